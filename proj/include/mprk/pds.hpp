#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace mprk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// N x N non-negative rate matrix with zero diagonal. Entry (i,j) is the rate
/// at which constituent j transforms into constituent i. Destruction rates are
/// never stored: the rate at which i is consumed in favour of j is the
/// transposed entry (j,i), which makes the component sum a conserved quantity
/// by construction.
class ProductionMatrix {
public:
  /// Validates dimensions, finiteness, non-negativity and the zero diagonal.
  explicit ProductionMatrix(Matrix entries);

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  /// Total production per constituent (row sums).
  Vector production() const { return mat_.rowwise().sum(); }
  /// Total destruction per constituent (column sums of the same matrix).
  Vector destruction() const { return mat_.colwise().sum().transpose(); }

private:
  Matrix mat_;
};

/// Two-constituent monomial exchange: constituent `donor` decays at rate
/// mu * y_donor^exponent and the mass reappears in `acceptor`. Indices are
/// 1-based; exponent is 1 or 2. Closed-form solution available.
struct MonomialPairParams {
  int donor = 1;
  int acceptor = 2;
  double mu = 1.0;
  int exponent = 1;
  int dim = 2;
};

/// A named production-destruction ODE system dy_i/dt = P_i(y) - D_i(y).
/// Users supply only the production matrix; destruction is its transpose.
struct PDSystem {
  std::string name;
  Eigen::Index dim = 0;
  /// State -> raw production entries; validated on every evaluation.
  std::function<Matrix(const Vector&)> production;
  /// Closed-form solution (t, y0) -> y(t); empty when none is known.
  std::function<Vector(double, const Vector&)> exact;
  /// Initial data used by the benchmark drivers.
  Vector default_initial;
};

inline bool has_exact_solution(const PDSystem& sys) {
  return static_cast<bool>(sys.exact);
}

/// Evaluates and validates the production matrix at state y.
/// Throws std::invalid_argument on dimension mismatch and std::runtime_error
/// when the supplied system produces non-finite, negative or diagonal rates.
ProductionMatrix eval_production(const PDSystem& sys, const Vector& y);

/// Right-hand side P_i - D_i; the components sum to zero up to rounding.
Vector eval_rhs(const PDSystem& sys, const Vector& y);

/// Closed-form solution at time t from initial state y0.
/// Throws std::invalid_argument when the system has no closed form.
Vector exact_solution(const PDSystem& sys, double t, const Vector& y0);

/// Mass exchange between two constituents, y1' = y2 - a*y1. Closed form known.
PDSystem linear_exchange(double a = 5.0);

/// Algal-bloom chain: nutrients feed phytoplankton which decays to detritus
/// at rate a. The loss-rate parameter defaults to 0.3; no closed form.
PDSystem algal_bloom(double a = 0.3);

/// Six-constituent Brusselator reaction with all rate constants equal to one.
PDSystem brusselator();

/// Robertson chemical kinetics, rate constants 0.04, 1e4, 3e7. Stiff.
PDSystem robertson();

PDSystem monomial_pair(const MonomialPairParams& params);

/// Looks up a benchmark system by id: "linear", "nonlinear", "brusselator",
/// "robertson", or "monomial-pair[:donor,acceptor,mu,exponent[,dim]]".
PDSystem builtin(const std::string& id);

}  // namespace mprk
