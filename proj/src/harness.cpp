#include "mprk/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mprk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Trajectory exact_trajectory(const PDSystem& sys, const Vector& y0,
                            const std::vector<double>& grid) {
  Trajectory traj;
  traj.times = grid;
  traj.states.reserve(grid.size());
  const double t0 = grid.front();
  for (const double t : grid) traj.states.push_back(exact_solution(sys, t - t0, y0));
  return traj;
}

}  // namespace

double error_metric(const Trajectory& reference, const Trajectory& numeric) {
  if (reference.times != numeric.times) {
    throw std::invalid_argument("error_metric: trajectories use different time grids");
  }
  const std::size_t levels = reference.times.size();
  if (levels < 2) {
    throw std::invalid_argument("error_metric: need at least one executed step");
  }
  const Eigen::Index n = reference.states.front().size();
  if (n != numeric.states.front().size()) {
    throw std::invalid_argument("error_metric: trajectories have different dimensions");
  }
  const double steps = static_cast<double>(levels - 1);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t m = 1; m < levels; ++m) {
      const double ref = reference.states[m][i];
      const double diff = ref - numeric.states[m][i];
      mean += ref;
      sq += diff * diff;
    }
    mean /= steps;
    if (mean == 0.0) {
      throw std::invalid_argument("error_metric: reference component mean is zero");
    }
    total += std::sqrt(sq / steps) / mean;
  }
  return total / static_cast<double>(n);
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0) || !std::isfinite(x[k]) || !std::isfinite(y[k])) {
      return kNaN;
    }
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (m * sxy - sx * sy) / denom;
}

double observed_order(const std::vector<double>& dts, const std::vector<double>& errors) {
  if (dts.size() != errors.size() || dts.size() < 2) return kNaN;
  const std::size_t tail = std::max<std::size_t>(3, (dts.size() + 1) / 2);
  const std::size_t from = dts.size() > tail ? dts.size() - tail : 0;
  return fit_log_slope({dts.begin() + static_cast<long>(from), dts.end()},
                       {errors.begin() + static_cast<long>(from), errors.end()});
}

ConvergenceReport convergence_study(const PDSystem& sys, const Vector& y0, double t_end,
                                    const SchemeSpec& spec, double dt0, int levels) {
  if (levels < 3) {
    throw std::invalid_argument("convergence_study: need at least three levels");
  }
  if (!(dt0 > 0.0) || !(t_end > 0.0)) {
    throw std::invalid_argument("convergence_study: dt0 and t_end must be positive");
  }

  ConvergenceReport report;
  report.scheme = scheme_id(spec);
  report.problem = sys.name;

  for (int k = 0; k < levels; ++k) {
    const double dt_requested = dt0 / static_cast<double>(1L << k);
    const long steps = std::max(1L, std::lround(t_end / dt_requested));
    const auto grid = uniform_grid_steps(0.0, t_end, steps);
    const double dt_effective = t_end / static_cast<double>(steps);

    const auto start = std::chrono::steady_clock::now();
    const Trajectory numeric = integrate(sys, y0, grid, spec);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const Trajectory ref = has_exact_solution(sys)
                               ? exact_trajectory(sys, y0, grid)
                               : reference_solve(sys, y0, grid, ToleranceConfig{});

    report.dt.push_back(dt_effective);
    report.error.push_back(error_metric(ref, numeric));
    report.runtime_seconds.push_back(elapsed.count());

    std::vector<double> dts(report.dt.begin(), report.dt.begin() + k + 1);
    std::vector<double> errs(report.error.begin(), report.error.begin() + k + 1);
    report.slope_cumulative.push_back(fit_log_slope(dts, errs));
  }
  report.slope = observed_order(report.dt, report.error);
  return report;
}

DenominatorProbeReport probe_denominator_orders(const PDSystem& sys, const Vector& y0,
                                    const SchemeSpec& spec,
                                    const std::vector<double>& dts,
                                    bool corrupt_sigma_to_yn) {
  if (spec.family != SchemeFamily::MPRK43CaseI &&
      spec.family != SchemeFamily::MPRK43CaseII) {
    throw std::invalid_argument("probe_denominator_orders: spec must be a three-stage scheme");
  }
  if (dts.size() < 2) {
    throw std::invalid_argument("probe_denominator_orders: need at least two step sizes");
  }

  const Tableau3& t = spec.tableau;
  const Vector rhs0 = eval_rhs(sys, y0);

  DenominatorProbeReport report;
  report.dt = dts;
  for (const double dt : dts) {
    const auto [out, diag] = mprk43_step(sys, y0, dt, spec);
    (void)out;

    report.max_pi_deviation =
        std::max(report.max_pi_deviation, (diag.pwd_pi - y0).cwiseAbs().maxCoeff());
    report.err_rho.push_back((diag.pwd_rho - y0).cwiseAbs().maxCoeff());

    const double c3 = t.c3();
    double cond = 0.0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
      const double lhs =
          t.b2 * t.a21 * (y0[i] + t.a21 * dt * rhs0[i]) / diag.pwd_pi[i] +
          t.b3 * c3 * (y0[i] + c3 * dt * rhs0[i]) / diag.pwd_rho[i];
      cond = std::max(cond, std::abs(lhs - 0.5));
    }
    report.err_condition.push_back(cond);

    const Vector sigma = corrupt_sigma_to_yn ? y0 : diag.pwd_sigma;
    const Vector truth = has_exact_solution(sys)
                             ? exact_solution(sys, dt, y0)
                             : reference_solve(sys, y0, {0.0, dt}, ToleranceConfig{})
                                   .states.back();
    report.err_sigma.push_back((sigma - truth).cwiseAbs().maxCoeff());
  }

  report.slope_rho = observed_order(report.dt, report.err_rho);
  report.slope_condition = observed_order(report.dt, report.err_condition);
  report.slope_sigma = observed_order(report.dt, report.err_sigma);
  report.pass_pi = report.max_pi_deviation == 0.0;
  report.pass_rho = report.slope_rho >= 0.9;
  report.pass_condition = report.slope_condition >= 1.9;
  report.pass_sigma = report.slope_sigma >= 2.9;
  return report;
}

std::vector<FeasibilityCell> feasibility_map(double alpha_min, double alpha_max,
                                             double beta_min, double beta_max,
                                             int resolution) {
  if (resolution < 2) {
    throw std::invalid_argument("feasibility_map: resolution must be at least 2");
  }
  if (!(alpha_max > alpha_min) || !(beta_max > beta_min)) {
    throw std::invalid_argument("feasibility_map: empty parameter rectangle");
  }
  const double radius = std::sqrt(2.0) / 3.0;
  std::vector<FeasibilityCell> cells;
  cells.reserve(static_cast<std::size_t>(resolution + 1) *
                static_cast<std::size_t>(resolution + 1));
  for (int i = 0; i <= resolution; ++i) {
    const double alpha = alpha_min + (alpha_max - alpha_min) *
                                         (static_cast<double>(i) / resolution);
    for (int j = 0; j <= resolution; ++j) {
      const double beta = beta_min + (beta_max - beta_min) *
                                         (static_cast<double>(j) / resolution);
      FeasibilityCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      cell.feasible = feasible_case1(alpha, beta);
      cell.b2_eq_b3 =
          std::abs(std::hypot(alpha - 1.0 / 3.0, beta - 1.0 / 3.0) - radius) <= 1e-6;
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace mprk
