#pragma once

#include <Eigen/Dense>

namespace mprk {

/// Solves A x = b by LU factorization with partial (row) pivoting.
/// Throws std::runtime_error when a pivot is singular to working precision.
Eigen::VectorXd lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Inverse through the same pivoted factorization.
Eigen::MatrixXd lu_inverse(const Eigen::MatrixXd& A);

Eigen::VectorXd column_sums(const Eigen::MatrixXd& A);

}  // namespace mprk
