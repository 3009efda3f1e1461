#pragma once

#include <array>

namespace mprk {

/// Coefficients of an explicit three-stage Runge-Kutta scheme. The abscissae
/// are not stored: c2 = a21 and c3 = a31 + a32 for every scheme built here.
struct Tableau3 {
  double a21 = 0, a31 = 0, a32 = 0;
  double b1 = 0, b2 = 0, b3 = 0;

  double c2() const { return a21; }
  double c3() const { return a31 + a32; }
};

/// Constants of the Patankar-weight construction attached to a tableau:
/// the third-stage denominators use exponent 1/p, the sigma-stage ones 1/q,
/// and the sigma system combines the first two stages with beta1, beta2.
struct DerivedParams {
  double p = 0;
  double q = 0;
  double beta1 = 0;
  double beta2 = 0;
};

DerivedParams derived_params(const Tableau3& t);

/// Two-parameter third-order family. Requires alpha, beta nonzero, distinct,
/// and alpha away from 2/3 where the parameterization degenerates.
Tableau3 from_case1(double alpha, double beta);

/// One-parameter third-order family with c2 = c3 = 2/3; gamma must be nonzero.
Tableau3 from_case2(double gamma);

/// One-parameter family with c3 = 0. Some coefficient is always negative, so
/// these tableaus are never admissible; provided for diagnostics only.
Tableau3 from_case3(double gamma);

/// Residuals of the six third-order conditions. The first two (consistency of
/// the abscissae) hold by construction and are reported as exact zeros; the
/// remaining four are b-sum, first and second moment, and the a21*a32*b3
/// condition.
std::array<double, 6> satisfies_order3(const Tableau3& t);

/// Membership of (alpha, beta) in the region where the case-1 tableau has all
/// non-negative coefficients. Boundary ties count as feasible.
bool feasible_case1(double alpha, double beta);

/// Corner abscissa where the two upper feasibility bounds intersect,
/// (3 + (3-2*sqrt(2))^(1/3) + (3+2*sqrt(2))^(1/3)) / 6, about 0.89255.
double alpha0();

/// True when all six coefficients are non-negative, the order-3 residuals are
/// below 1e-12, and a21 >= 1/2 (required for the sigma-stage weights).
bool mprk43_admissible(const Tableau3& t);

/// Residuals of the weighted moment system
///   b2*a21*x + b3*c3*y = 1/2,  b2*a21^2*x^2 + b3*c3^2*y^2 = 1/3,  x*y = 1,
/// whose unique positive solution is x = y = 1 for admissible tableaus.
std::array<double, 3> check_limsys(const Tableau3& t, double x, double y);

}  // namespace mprk
