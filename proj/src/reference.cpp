#include "mprk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mprk {

namespace {

// Dormand-Prince 5(4) coefficients; the seventh stage is first-same-as-last.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory reference_solve(const PDSystem& sys, const Vector& y0,
                           const std::vector<double>& output_times,
                           const ToleranceConfig& tol, long max_steps) {
  if (output_times.empty()) {
    throw std::invalid_argument("reference_solve: output_times must not be empty");
  }
  for (std::size_t k = 1; k < output_times.size(); ++k) {
    if (!(output_times[k] > output_times[k - 1])) {
      throw std::invalid_argument("reference_solve: output_times must be increasing");
    }
  }
  if (y0.size() != sys.dim) {
    throw std::invalid_argument("reference_solve: initial state dimension mismatch");
  }
  if (!(tol.abstol > 0.0) || !(tol.reltol > 0.0)) {
    throw std::invalid_argument("reference_solve: tolerances must be positive");
  }

  Trajectory out;
  out.times = output_times;
  out.states.reserve(output_times.size());
  out.states.push_back(y0);
  if (output_times.size() == 1) return out;

  const auto f = [&sys](const Vector& v) { return eval_rhs(sys, v); };

  Vector y = y0;
  double t = output_times.front();
  Vector k1 = f(y);

  const double span = output_times.back() - output_times.front();
  double dt = 0.01 * y.cwiseAbs().maxCoeff() /
              std::max(k1.cwiseAbs().maxCoeff(), 1e-8);
  dt = std::min({dt, span, output_times[1] - output_times[0]});

  long steps = 0;
  for (std::size_t idx = 1; idx < output_times.size(); ++idx) {
    const double t_target = output_times[idx];
    while (t < t_target) {
      bool clipped = false;
      double h = dt;
      if (t + h >= t_target) {
        h = t_target - t;
        clipped = true;
      }

      const Vector k2 = f(y + h * (a21 * k1));
      const Vector k3 = f(y + h * (a31 * k1 + a32 * k2));
      const Vector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vector k7 = f(ynew);
      const Vector err =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      // Accept well inside the advertised bound; the margin keeps the
      // global drift between nearby tolerance settings comfortably small.
      const double bound =
          0.25 * (tol.abstol + tol.reltol * y.cwiseAbs().maxCoeff());
      const double errnorm = err.cwiseAbs().maxCoeff();

      if (errnorm <= bound) {
        t = clipped ? t_target : t + h;
        y = ynew;
        k1 = k7;
        const double fac =
            errnorm > 0.0 ? std::clamp(0.9 * std::pow(bound / errnorm, 0.2), 0.2, 5.0)
                          : 5.0;
        // Do not let a step clipped to an output time shrink the controller state.
        dt = clipped ? std::max(dt, h * fac) : h * fac;
      } else {
        dt = h * std::clamp(0.9 * std::pow(bound / errnorm, 0.2), 0.1, 0.9);
      }

      if (!(dt > 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))) {
        throw std::runtime_error(
            "reference_solve: step size underflow; system too stiff for the explicit pair");
      }
      if (++steps > max_steps) {
        throw std::runtime_error(
            "reference_solve: step budget exhausted; system too stiff for the explicit pair");
      }
    }
    out.states.push_back(y);
  }
  return out;
}

}  // namespace mprk
