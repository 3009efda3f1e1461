#include "mprk/tableau.hpp"

#include <cmath>
#include <stdexcept>

namespace mprk {

DerivedParams derived_params(const Tableau3& t) {
  DerivedParams d;
  d.p = 3.0 * t.a21 * (t.a31 + t.a32) * t.b3;
  d.q = t.a21;
  d.beta2 = 1.0 / (2.0 * t.a21);
  d.beta1 = 1.0 - d.beta2;
  return d;
}

Tableau3 from_case1(double alpha, double beta) {
  if (alpha == 0.0 || beta == 0.0) {
    throw std::invalid_argument("from_case1: alpha and beta must be nonzero");
  }
  if (alpha == beta) {
    throw std::invalid_argument("from_case1: alpha and beta must differ");
  }
  // The denominator alpha*(2-3*alpha) vanishes at alpha = 2/3; reject a small
  // window around it instead of returning enormous coefficients.
  if (std::abs(2.0 - 3.0 * alpha) < 1e-12) {
    throw std::invalid_argument("from_case1: alpha too close to 2/3");
  }
  Tableau3 t;
  t.a21 = alpha;
  const double denom = alpha * (2.0 - 3.0 * alpha);
  t.a31 = (3.0 * alpha * beta * (1.0 - alpha) - beta * beta) / denom;
  t.a32 = beta * (beta - alpha) / denom;
  t.b1 = 1.0 + (2.0 - 3.0 * (alpha + beta)) / (6.0 * alpha * beta);
  t.b2 = (3.0 * beta - 2.0) / (6.0 * alpha * (beta - alpha));
  t.b3 = (2.0 - 3.0 * alpha) / (6.0 * beta * (beta - alpha));
  return t;
}

Tableau3 from_case2(double gamma) {
  if (gamma == 0.0) {
    throw std::invalid_argument("from_case2: gamma must be nonzero");
  }
  Tableau3 t;
  t.a21 = 2.0 / 3.0;
  t.a31 = 2.0 / 3.0 - 1.0 / (4.0 * gamma);
  t.a32 = 1.0 / (4.0 * gamma);
  t.b1 = 0.25;
  t.b2 = 0.75 - gamma;
  t.b3 = gamma;
  return t;
}

Tableau3 from_case3(double gamma) {
  if (gamma == 0.0) {
    throw std::invalid_argument("from_case3: gamma must be nonzero");
  }
  Tableau3 t;
  t.a21 = 2.0 / 3.0;
  t.a31 = -1.0 / (4.0 * gamma);
  t.a32 = 1.0 / (4.0 * gamma);
  t.b1 = 0.25 - gamma;
  t.b2 = 0.75;
  t.b3 = gamma;
  return t;
}

std::array<double, 6> satisfies_order3(const Tableau3& t) {
  const double c2 = t.c2();
  const double c3 = t.c3();
  return {
      0.0,
      0.0,
      t.b1 + t.b2 + t.b3 - 1.0,
      t.b2 * c2 + t.b3 * c3 - 0.5,
      t.b2 * c2 * c2 + t.b3 * c3 * c3 - 1.0 / 3.0,
      t.a21 * t.a32 * t.b3 - 1.0 / 6.0,
  };
}

bool feasible_case1(double alpha, double beta) {
  const double parabola = 3.0 * alpha * (1.0 - alpha);
  const double two_thirds = 2.0 / 3.0;
  if (alpha >= 1.0 / 3.0 && alpha < two_thirds) {
    return two_thirds <= beta && beta <= parabola;
  }
  const double a0 = alpha0();
  if (alpha > two_thirds && alpha < a0) {
    return parabola <= beta && beta <= two_thirds;
  }
  if (alpha > a0) {
    const double lower = (3.0 * alpha - 2.0) / (6.0 * alpha - 3.0);
    return lower <= beta && beta <= two_thirds;
  }
  return false;
}

double alpha0() {
  const double r = 2.0 * std::sqrt(2.0);
  return (3.0 + std::cbrt(3.0 - r) + std::cbrt(3.0 + r)) / 6.0;
}

bool mprk43_admissible(const Tableau3& t) {
  if (t.a21 < 0.5) return false;
  if (t.a31 < 0.0 || t.a32 < 0.0 || t.b1 < 0.0 || t.b2 < 0.0 || t.b3 < 0.0) {
    return false;
  }
  for (const double r : satisfies_order3(t)) {
    if (std::abs(r) >= 1e-12) return false;
  }
  return true;
}

std::array<double, 3> check_limsys(const Tableau3& t, double x, double y) {
  const double c3 = t.c3();
  return {
      t.b2 * t.a21 * x + t.b3 * c3 * y - 0.5,
      t.b2 * t.a21 * t.a21 * x * x + t.b3 * c3 * c3 * y * y - 1.0 / 3.0,
      x * y - 1.0,
  };
}

}  // namespace mprk
