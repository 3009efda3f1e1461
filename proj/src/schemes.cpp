#include "mprk/schemes.hpp"

#include "mprk/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mprk {

namespace {

constexpr double kSmallestNormal = std::numeric_limits<double>::min();

void clamp_positive(Vector& v, StepDiagnostics& diag) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < kSmallestNormal) {
      v[i] = kSmallestNormal;
      ++diag.underflow_clamps;
    }
  }
}

void require_positive_state(const PDSystem& sys, const Vector& y) {
  if (y.size() != sys.dim) {
    throw std::invalid_argument("step: state dimension does not match system '" +
                                sys.name + "'");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
      throw std::invalid_argument("step: state must be strictly positive and finite");
    }
  }
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step: dt must be positive and finite");
  }
}

/// Weight denominators yn_i * (z_i / yn_i)^(1/e), evaluated in log space.
Vector pwd_power(const Vector& yn, const Vector& z, double e, StepDiagnostics& diag) {
  Vector out(yn.size());
  for (Eigen::Index i = 0; i < yn.size(); ++i) {
    out[i] = yn[i] * std::exp(std::log(z[i] / yn[i]) / e);
  }
  clamp_positive(out, diag);
  return out;
}

// Neumaier running sum; used where giant terms must cancel exactly.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void record_matrix(const Matrix& m, StepDiagnostics& diag) {
  double dev = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double scale = std::max(1.0, m.col(j).cwiseAbs().maxCoeff());
    dev = std::max(dev, std::abs(m.col(j).sum() - 1.0) / scale);
  }
  diag.full_matrices.push_back(m);
  diag.colsum_deviation.push_back(dev);
  diag.max_colsum_deviation = std::max(diag.max_colsum_deviation, dev);
}

/// Implicit Patankar solve. `wprod` carries the Runge-Kutta weights already:
/// the system is m_jj = 1 + dt * colsum_j(wprod) / pwd_j on the diagonal and
/// m_ij = -dt * wprod_ij / pwd_j off it, with right-hand side `rhs`. Column
/// sums equal one, so the solution conserves the component sum of `rhs`.
Vector weighted_solve(const Matrix& wprod, const Vector& pwd, const Vector& rhs,
                      double dt, StepDiagnostics& diag) {
  const Eigen::Index n = wprod.rows();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // dt * rate first: dt / pwd alone can overflow when a denominator sits
    // at the clamp floor while the rates are denormal.
    double destr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) destr += wprod(i, j);
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = -(dt * wprod(i, j)) / pwd[j];
    m(j, j) = 1.0 + (dt * destr) / pwd[j];
  }
  record_matrix(m, diag);
  Vector x = lu_solve(m, rhs);

  // Two rounds of iterative refinement with compensated residuals. The raw
  // solve leaves row residuals of the order of eps times the largest row
  // entry, which is exactly the mass-balance defect when the gross transfer
  // rates dwarf the net ones.
  for (int round = 0; round < 2; ++round) {
    Vector residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      CompensatedSum row;
      row.add(-rhs[i]);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double p = m(i, j) * x[j];
        row.add(p);
        row.add(std::fma(m(i, j), x[j], -p));
      }
      residual[i] = row.value();
    }
    if (residual.isZero(0.0)) break;
    x -= lu_solve(m, residual);
  }

  // Conservative projection: when the assembly rounding of very large
  // entries leaves a visible defect in the component sum, rescale all
  // components by the common factor. The relative nudge is of the order of
  // the solution's inherent uncertainty and keeps every component positive.
  CompensatedSum sum_out, sum_rhs;
  for (Eigen::Index i = 0; i < n; ++i) {
    sum_out.add(x[i]);
    sum_rhs.add(rhs[i]);
  }
  const double ratio = sum_rhs.value() / sum_out.value();
  if (std::abs(ratio - 1.0) > 16.0 * std::numeric_limits<double>::epsilon()) {
    x *= ratio;
  }
  clamp_positive(x, diag);
  return x;
}

/// Stage solve with explicit production: the system is diagonal, so each
/// component is a single positive division.
Vector diagonal_solve(const Matrix& wprod, const Vector& pwd, const Vector& rhs,
                      double dt, StepDiagnostics& diag) {
  const Vector prod = wprod.rowwise().sum();
  const Vector destr = wprod.colwise().sum().transpose();
  Vector x(rhs.size());
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    x[i] = (rhs[i] + dt * prod[i]) / (1.0 + dt * destr[i] / pwd[i]);
  }
  clamp_positive(x, diag);
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

SchemeSpec mpe() {
  SchemeSpec spec;
  spec.family = SchemeFamily::MPE;
  return spec;
}

SchemeSpec mprk22(double alpha, int delta) {
  if (!(alpha >= 0.5)) {
    throw std::invalid_argument(
        "mprk22: alpha must be at least 1/2 for non-negative final weights");
  }
  if (delta != 0 && delta != 1) {
    throw std::invalid_argument("mprk22: delta must be 0 or 1");
  }
  SchemeSpec spec;
  spec.family = SchemeFamily::MPRK22;
  spec.alpha = alpha;
  spec.delta = delta;
  return spec;
}

SchemeSpec mprk43i(double alpha, double beta, int delta) {
  if (delta != 0 && delta != 1) {
    throw std::invalid_argument("mprk43i: delta must be 0 or 1");
  }
  SchemeSpec spec;
  spec.family = SchemeFamily::MPRK43CaseI;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.delta = delta;
  spec.tableau = from_case1(alpha, beta);
  if (!mprk43_admissible(spec.tableau)) {
    throw std::invalid_argument("mprk43i: (alpha, beta) = (" + format_param(alpha) +
                                ", " + format_param(beta) +
                                ") gives an inadmissible tableau");
  }
  spec.derived = derived_params(spec.tableau);
  return spec;
}

SchemeSpec mprk43ii(double gamma, int delta) {
  if (delta != 0 && delta != 1) {
    throw std::invalid_argument("mprk43ii: delta must be 0 or 1");
  }
  SchemeSpec spec;
  spec.family = SchemeFamily::MPRK43CaseII;
  spec.gamma = gamma;
  spec.delta = delta;
  spec.tableau = from_case2(gamma);
  if (!mprk43_admissible(spec.tableau)) {
    throw std::invalid_argument("mprk43ii: gamma = " + format_param(gamma) +
                                " gives an inadmissible tableau");
  }
  spec.derived = derived_params(spec.tableau);
  return spec;
}

SchemeSpec parse_scheme(const std::string& id) {
  auto tokens = split(id, ':');
  if (tokens.empty()) throw std::invalid_argument("empty scheme id");
  int delta = 1;
  if (tokens.size() > 1 && tokens.back() == "ncs") {
    delta = 0;
    tokens.pop_back();
  }
  const std::string& family = tokens[0];
  const auto params = tokens.size() > 1 ? split(tokens[1], ',') : std::vector<std::string>{};
  try {
    if (family == "mpe") {
      if (tokens.size() != 1 || delta == 0) {
        throw std::invalid_argument("mpe takes no parameters");
      }
      return mpe();
    }
    if (family == "mprk22") {
      if (params.size() != 1) throw std::invalid_argument("mprk22 needs one parameter");
      return mprk22(std::stod(params[0]), delta);
    }
    if (family == "mprk43i") {
      if (params.size() != 2) throw std::invalid_argument("mprk43i needs two parameters");
      return mprk43i(std::stod(params[0]), std::stod(params[1]), delta);
    }
    if (family == "mprk43ii") {
      if (params.size() != 1) throw std::invalid_argument("mprk43ii needs one parameter");
      return mprk43ii(std::stod(params[0]), delta);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed scheme id '" + id + "'");
  }
  throw std::invalid_argument("unknown scheme id '" + id + "'");
}

std::string scheme_id(const SchemeSpec& spec) {
  std::string id;
  switch (spec.family) {
    case SchemeFamily::MPE:
      return "mpe";
    case SchemeFamily::MPRK22:
      id = "mprk22:" + format_param(spec.alpha);
      break;
    case SchemeFamily::MPRK43CaseI:
      id = "mprk43i:" + format_param(spec.alpha) + "," + format_param(spec.beta);
      break;
    case SchemeFamily::MPRK43CaseII:
      id = "mprk43ii:" + format_param(spec.gamma);
      break;
  }
  if (spec.delta == 0) id += ":ncs";
  return id;
}

int scheme_order(const SchemeSpec& spec) {
  switch (spec.family) {
    case SchemeFamily::MPE:
      return 1;
    case SchemeFamily::MPRK22:
      return 2;
    default:
      return 3;
  }
}

std::vector<SchemeSpec> named_mprk43_schemes() {
  return {
      mprk43i(1.0, 0.5, 1),  mprk43i(1.0, 0.5, 0),
      mprk43i(0.5, 0.75, 1), mprk43i(0.5, 0.75, 0),
      mprk43ii(0.5, 1),      mprk43ii(0.5, 0),
  };
}

std::pair<Vector, StepDiagnostics> mprk22_step(const PDSystem& sys, const Vector& y,
                                               double dt, double alpha, int delta) {
  if (!(alpha >= 0.5)) {
    throw std::invalid_argument("mprk22_step: alpha must be at least 1/2");
  }
  require_positive_state(sys, y);
  require_positive_dt(dt);

  StepDiagnostics diag;
  const Matrix p1 = eval_production(sys, y).matrix();

  diag.pwd_pi = y;
  const Matrix w2 = alpha * p1;
  Vector y2 = delta == 1 ? weighted_solve(w2, y, y, dt, diag)
                         : diagonal_solve(w2, y, y, dt, diag);
  diag.stage2 = y2;

  diag.pwd_sigma = pwd_power(y, y2, alpha, diag);
  const Matrix p2 = eval_production(sys, y2).matrix();

  const double b2 = 1.0 / (2.0 * alpha);
  const double b1 = 1.0 - b2;
  const Matrix wf = b1 * p1 + b2 * p2;
  Vector out = weighted_solve(wf, diag.pwd_sigma, y, dt, diag);
  return {std::move(out), std::move(diag)};
}

namespace detail {

std::pair<Vector, StepDiagnostics> mprk43_step_impl(const PDSystem& sys, const Vector& y,
                                                    double dt, const SchemeSpec& spec,
                                                    const Vector* stage3_override) {
  if (spec.family != SchemeFamily::MPRK43CaseI &&
      spec.family != SchemeFamily::MPRK43CaseII) {
    throw std::invalid_argument("mprk43_step: spec is not a three-stage scheme");
  }
  if (!mprk43_admissible(spec.tableau)) {
    throw std::invalid_argument("mprk43_step: tableau is not admissible");
  }
  require_positive_state(sys, y);
  require_positive_dt(dt);

  const Tableau3& t = spec.tableau;
  const DerivedParams& d = spec.derived;
  StepDiagnostics diag;

  const Matrix p1 = eval_production(sys, y).matrix();

  // Second stage, weight denominators pi = y.
  diag.pwd_pi = y;
  const Matrix w2 = t.a21 * p1;
  Vector y2 = spec.delta == 1 ? weighted_solve(w2, y, y, dt, diag)
                              : diagonal_solve(w2, y, y, dt, diag);
  diag.stage2 = y2;

  diag.pwd_rho = pwd_power(y, y2, d.p, diag);
  const Matrix p2 = eval_production(sys, y2).matrix();

  // Third stage.
  const Matrix w3 = t.a31 * p1 + t.a32 * p2;
  Vector y3 = spec.delta == 1 ? weighted_solve(w3, diag.pwd_rho, y, dt, diag)
                              : diagonal_solve(w3, diag.pwd_rho, y, dt, diag);
  if (stage3_override != nullptr) y3 = *stage3_override;
  diag.stage3 = y3;

  // Sigma system: the embedded second-order step, always fully weighted.
  diag.pwd_mu = pwd_power(y, y2, d.q, diag);
  const Matrix ws = d.beta1 * p1 + d.beta2 * p2;
  diag.pwd_sigma = weighted_solve(ws, diag.pwd_mu, y, dt, diag);

  const Matrix p3 = eval_production(sys, y3).matrix();
  const Matrix wf = t.b1 * p1 + t.b2 * p2 + t.b3 * p3;
  Vector out = weighted_solve(wf, diag.pwd_sigma, y, dt, diag);
  return {std::move(out), std::move(diag)};
}

}  // namespace detail

std::pair<Vector, StepDiagnostics> mprk43_step(const PDSystem& sys, const Vector& y,
                                               double dt, const SchemeSpec& spec) {
  return detail::mprk43_step_impl(sys, y, dt, spec, nullptr);
}

Vector mpe_step(const PDSystem& sys, const Vector& y, double dt) {
  require_positive_state(sys, y);
  require_positive_dt(dt);
  StepDiagnostics diag;
  const Matrix p1 = eval_production(sys, y).matrix();
  diag.pwd_sigma = y;
  return weighted_solve(p1, y, y, dt, diag);
}

std::pair<Vector, StepDiagnostics> step(const PDSystem& sys, const Vector& y,
                                        double dt, const SchemeSpec& spec) {
  switch (spec.family) {
    case SchemeFamily::MPE: {
      require_positive_state(sys, y);
      require_positive_dt(dt);
      StepDiagnostics diag;
      const Matrix p1 = eval_production(sys, y).matrix();
      diag.pwd_sigma = y;
      Vector out = weighted_solve(p1, y, y, dt, diag);
      return {std::move(out), std::move(diag)};
    }
    case SchemeFamily::MPRK22:
      return mprk22_step(sys, y, dt, spec.alpha, spec.delta);
    default:
      return mprk43_step(sys, y, dt, spec);
  }
}

Trajectory integrate(const PDSystem& sys, const Vector& y0,
                     const std::vector<double>& grid, const SchemeSpec& spec,
                     bool record_diagnostics) {
  if (grid.empty()) {
    throw std::invalid_argument("integrate: time grid must not be empty");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw std::invalid_argument("integrate: time grid must be strictly increasing");
    }
  }
  require_positive_state(sys, y0);

  Trajectory traj;
  traj.times = grid;
  traj.states.reserve(grid.size());
  traj.states.push_back(y0);
  if (record_diagnostics) traj.diagnostics.reserve(grid.size() - 1);

  Vector y = y0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    auto [next, diag] = step(sys, y, grid[k] - grid[k - 1], spec);
    y = std::move(next);
    traj.states.push_back(y);
    if (record_diagnostics) traj.diagnostics.push_back(std::move(diag));
  }
  return traj;
}

std::vector<double> geometric_grid(double t0, double dt0, double ratio, double t_end) {
  if (!(dt0 > 0.0)) throw std::invalid_argument("geometric_grid: dt0 must be positive");
  if (!(ratio > 1.0)) throw std::invalid_argument("geometric_grid: ratio must exceed 1");
  if (!(t_end > t0)) throw std::invalid_argument("geometric_grid: t_end must exceed t0");
  std::vector<double> levels{t0};
  double dt = dt0;
  while (levels.back() < t_end) {
    levels.push_back(levels.back() + dt);
    dt *= ratio;
  }
  return levels;
}

std::vector<double> uniform_grid(double t0, double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_grid: dt must be positive");
  if (!(t_end > t0)) throw std::invalid_argument("uniform_grid: t_end must exceed t0");
  std::vector<double> levels{t0};
  const double tol = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t_end)});
  for (long k = 1;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t >= t_end - tol) break;
    levels.push_back(t);
  }
  levels.push_back(t_end);
  return levels;
}

std::vector<double> uniform_grid_steps(double t0, double t_end, long steps) {
  if (steps < 1) throw std::invalid_argument("uniform_grid_steps: need at least one step");
  if (!(t_end > t0)) throw std::invalid_argument("uniform_grid_steps: t_end must exceed t0");
  const double span = t_end - t0;
  std::vector<double> levels(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k <= steps; ++k) {
    levels[static_cast<std::size_t>(k)] =
        t0 + span * (static_cast<double>(k) / static_cast<double>(steps));
  }
  levels.back() = t_end;
  return levels;
}

}  // namespace mprk
