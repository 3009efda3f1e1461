#include "mprk/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mprk {

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> checked_lu(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("lu_solve: matrix must be square");
  }
  if (A.rows() == 0) {
    throw std::invalid_argument("lu_solve: empty matrix");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  // Row pivoting leaves the column correspondence intact, so each pivot is
  // judged against the magnitude of its own column. A global scale would
  // falsely flag strongly graded matrices.
  const double n_eps =
      static_cast<double>(A.rows()) * std::numeric_limits<double>::epsilon();
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double col_scale = A.col(j).cwiseAbs().maxCoeff();
    if (std::abs(lu.matrixLU()(j, j)) <= n_eps * col_scale) {
      throw std::runtime_error("lu_solve: pivot singular to working precision");
    }
  }
  return lu;
}

}  // namespace

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (b.size() != A.rows()) {
    throw std::invalid_argument("lu_solve: right-hand side dimension mismatch");
  }
  return checked_lu(A).solve(b);
}

Eigen::MatrixXd lu_inverse(const Eigen::MatrixXd& A) {
  return checked_lu(A).inverse();
}

Eigen::VectorXd column_sums(const Eigen::MatrixXd& A) {
  return A.colwise().sum().transpose();
}

}  // namespace mprk
