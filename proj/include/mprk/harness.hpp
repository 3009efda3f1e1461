#pragma once

#include "mprk/pds.hpp"
#include "mprk/reference.hpp"
#include "mprk/schemes.hpp"

#include <string>
#include <vector>

namespace mprk {

/// Relative trajectory error averaged over constituents: for each component,
/// the root-mean-square deviation over the executed steps (the initial level
/// is excluded) divided by the mean of the reference component.
double error_metric(const Trajectory& reference, const Trajectory& numeric);

/// Least-squares slope of log(y) against log(x). NaN when fewer than two
/// points are given or any value is non-positive or non-finite.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Observed order of a refinement study: the log-log slope fitted over the
/// finest half of the levels (at least three). The coarsest levels of a
/// sequence often sit outside the asymptotic regime; fitting the tail keeps
/// the estimate faithful to the order actually reached.
double observed_order(const std::vector<double>& dts, const std::vector<double>& errors);

struct ConvergenceReport {
  std::string scheme;
  std::string problem;
  std::vector<double> dt;
  std::vector<double> error;
  std::vector<double> runtime_seconds;
  /// Plain fit over levels 0..k; the first entry is NaN.
  std::vector<double> slope_cumulative;
  /// Observed order (tail fit); NaN when undefined (e.g. an exact integrator).
  double slope = 0;
};

/// Runs uniform grids dt0/2^k for k = 0..levels-1 on [0, t_end], measuring the
/// error against the closed form when available and against the adaptive
/// reference at tolerance 1e-10 otherwise.
ConvergenceReport convergence_study(const PDSystem& sys, const Vector& y0, double t_end,
                                    const SchemeSpec& spec, double dt0, int levels);

/// Single-step order probes of the weight denominators on a shrinking dt
/// sequence: (a) the first-stage denominators must equal the initial state
/// exactly; (b) the third-stage denominators approach it at first order;
/// (c) the weighted stage combination approaches 1/2 at second order;
/// (d) the sigma denominators approach the true solution at third order.
struct DenominatorProbeReport {
  std::vector<double> dt;
  std::vector<double> err_rho;
  std::vector<double> err_condition;
  std::vector<double> err_sigma;
  double max_pi_deviation = 0;
  double slope_rho = 0;
  double slope_condition = 0;
  double slope_sigma = 0;
  bool pass_pi = false;
  bool pass_rho = false;
  bool pass_condition = false;
  bool pass_sigma = false;
  bool pass() const { return pass_pi && pass_rho && pass_condition && pass_sigma; }
};

/// With corrupt_sigma_to_yn the sigma probe uses the initial state instead of
/// the computed denominators; the third-order check must then flag failure.
DenominatorProbeReport probe_denominator_orders(const PDSystem& sys, const Vector& y0,
                                    const SchemeSpec& spec,
                                    const std::vector<double>& dts,
                                    bool corrupt_sigma_to_yn = false);

struct FeasibilityCell {
  double alpha = 0;
  double beta = 0;
  bool feasible = false;
  /// Within 1e-6 of the circle centred at (1/3, 1/3) with radius sqrt(2)/3,
  /// where the two final weights of the case-1 tableau coincide.
  bool b2_eq_b3 = false;
};

/// Samples the rectangle on a grid with `resolution` intervals per axis
/// (resolution + 1 points, endpoints included). Doubling the resolution
/// reproduces the coarse points exactly.
std::vector<FeasibilityCell> feasibility_map(double alpha_min, double alpha_max,
                                             double beta_min, double beta_max,
                                             int resolution);

}  // namespace mprk
