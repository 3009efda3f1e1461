#pragma once

#include "mprk/pds.hpp"
#include "mprk/schemes.hpp"

#include <vector>

namespace mprk {

struct ToleranceConfig {
  double abstol = 1e-10;
  double reltol = 1e-10;
};

/// High-accuracy trajectory from an adaptive embedded 5(4) Runge-Kutta pair
/// (Dormand-Prince). Integration lands exactly on every requested output time
/// and the estimated local error per step is kept at or below
/// abstol + reltol * max|y|. Intended for the non-stiff benchmark systems;
/// throws std::runtime_error on step-size underflow or when the step budget
/// is exhausted, both of which signal stiffness.
Trajectory reference_solve(const PDSystem& sys, const Vector& y0,
                           const std::vector<double>& output_times,
                           const ToleranceConfig& tol, long max_steps = 20000000);

}  // namespace mprk
