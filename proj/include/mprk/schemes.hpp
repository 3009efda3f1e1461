#pragma once

#include "mprk/pds.hpp"
#include "mprk/tableau.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mprk {

enum class SchemeFamily { MPE, MPRK22, MPRK43CaseI, MPRK43CaseII };

/// A fully validated integrator selection. `delta` chooses between
/// conservative stages (1, fully implicit stage solves) and explicit-production
/// stages (0, the "ncs" variants with diagonal stage systems).
struct SchemeSpec {
  SchemeFamily family = SchemeFamily::MPE;
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  int delta = 1;
  Tableau3 tableau{};       // three-stage schemes only
  DerivedParams derived{};  // three-stage schemes only
};

SchemeSpec mpe();
SchemeSpec mprk22(double alpha, int delta = 1);
SchemeSpec mprk43i(double alpha, double beta, int delta = 1);
SchemeSpec mprk43ii(double gamma, int delta = 1);

/// Parses ids of the form "mpe", "mprk22:<alpha>", "mprk43i:<alpha>,<beta>",
/// "mprk43ii:<gamma>", each optionally suffixed with ":ncs" for delta = 0.
SchemeSpec parse_scheme(const std::string& id);
std::string scheme_id(const SchemeSpec& spec);
int scheme_order(const SchemeSpec& spec);

/// The six benchmark third-order schemes: case I (1,1/2) and (1/2,3/4),
/// case II gamma = 1/2, each in both stage variants.
std::vector<SchemeSpec> named_mprk43_schemes();

/// Per-step record of stage values, weight denominators and the assembled
/// full (non-diagonal) linear systems in solve order.
struct StepDiagnostics {
  Vector stage2, stage3;
  Vector pwd_pi, pwd_rho, pwd_mu, pwd_sigma;
  std::vector<Matrix> full_matrices;
  /// Per full matrix: |column sum - 1| scaled by the column magnitude.
  std::vector<double> colsum_deviation;
  double max_colsum_deviation = 0.0;
  /// Number of components clamped to the smallest positive normal number.
  int underflow_clamps = 0;
};

/// One step of the second-order scheme: weight denominators pi = y for the
/// stage and sigma_i = y_i * (y2_i/y_i)^(1/alpha) for the final solve.
/// Requires alpha >= 1/2 so that both final-stage weights are non-negative.
std::pair<Vector, StepDiagnostics> mprk22_step(const PDSystem& sys, const Vector& y,
                                               double dt, double alpha, int delta);

/// One step of a third-order scheme. Four linear solves: the two stage systems
/// (diagonal when delta = 0), the sigma system and the final system, the last
/// two always fully weighted.
std::pair<Vector, StepDiagnostics> mprk43_step(const PDSystem& sys, const Vector& y,
                                               double dt, const SchemeSpec& spec);

/// One step of the first-order scheme: a single solve with sigma = y.
Vector mpe_step(const PDSystem& sys, const Vector& y, double dt);

/// Dispatch on the scheme family.
std::pair<Vector, StepDiagnostics> step(const PDSystem& sys, const Vector& y,
                                        double dt, const SchemeSpec& spec);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<StepDiagnostics> diagnostics;  // one per step when recorded
};

/// Steps over consecutive grid intervals starting from y0 at grid.front().
Trajectory integrate(const PDSystem& sys, const Vector& y0,
                     const std::vector<double>& grid, const SchemeSpec& spec,
                     bool record_diagnostics = false);

/// Time levels t0, t0+dt0, t0+dt0*(1+ratio), ... with step sizes growing by
/// `ratio` each step, ending with the first level at or past t_end. The final
/// step is not clipped.
std::vector<double> geometric_grid(double t0, double dt0, double ratio, double t_end);

/// Uniform levels of spacing dt from t0; the final step is clipped so the last
/// level is exactly t_end.
std::vector<double> uniform_grid(double t0, double t_end, double dt);

/// Uniform grid with a prescribed number of steps and exact endpoints.
std::vector<double> uniform_grid_steps(double t0, double t_end, long steps);

namespace detail {

/// As mprk43_step, with an optional replacement for the third stage value.
/// Used by structural tests: the weight denominators must not depend on it.
std::pair<Vector, StepDiagnostics> mprk43_step_impl(const PDSystem& sys, const Vector& y,
                                                    double dt, const SchemeSpec& spec,
                                                    const Vector* stage3_override);

}  // namespace detail

}  // namespace mprk
