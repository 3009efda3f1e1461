#include "mprk/schemes.hpp"

#include "mprk/harness.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mprk;

namespace {

std::vector<SchemeSpec> all_named_schemes() {
  auto schemes = named_mprk43_schemes();
  schemes.push_back(mprk22(1.0));
  schemes.push_back(mprk22(0.5));
  schemes.push_back(mprk22(2.0 / 3.0));
  schemes.push_back(mpe());
  return schemes;
}

double relative_sum_drift(const Vector& before, const Vector& after) {
  return std::abs(after.sum() - before.sum()) / before.sum();
}

}  // namespace

TEST_SUITE("schemes") {

TEST_CASE("spec construction and validation") {
  CHECK_THROWS_AS(mprk22(0.4), std::invalid_argument);
  CHECK_THROWS_AS(mprk43i(1.0 / 3.0, 2.0 / 3.0), std::invalid_argument);  // a21 < 1/2
  CHECK_THROWS_AS(mprk43i(0.9, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(mprk43ii(0.3), std::invalid_argument);
  CHECK_THROWS_AS(mprk43ii(0.8), std::invalid_argument);
  CHECK(mprk43i(1.0, 0.5).derived.p == doctest::Approx(1.0));
  CHECK(mprk43ii(0.5).derived.q == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("scheme id round trips") {
  for (const auto& spec : all_named_schemes()) {
    const SchemeSpec reparsed = parse_scheme(scheme_id(spec));
    CHECK(reparsed.family == spec.family);
    CHECK(reparsed.delta == spec.delta);
    CHECK(reparsed.alpha == spec.alpha);
    CHECK(reparsed.beta == spec.beta);
    CHECK(reparsed.gamma == spec.gamma);
  }
  CHECK(parse_scheme("mprk43i:1,0.5:ncs").delta == 0);
  CHECK_THROWS_AS(parse_scheme("mprk99:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("mprk43i:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("mprk22:abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("mpe:ncs"), std::invalid_argument);
}

TEST_CASE("vanishing step size returns the state") {
  const PDSystem sys = linear_exchange();
  const Vector y{{0.9, 0.1}};
  for (const auto& spec : all_named_schemes()) {
    CAPTURE(scheme_id(spec));
    const auto [out, diag] = step(sys, y, 1e-300, spec);
    CHECK(test_util::within_ulps(out, y, 1));
  }
}

TEST_CASE("step input validation") {
  const PDSystem sys = linear_exchange();
  const SchemeSpec spec = mprk43i(1.0, 0.5);
  CHECK_THROWS_AS(mprk43_step(sys, Vector{{0.9, -0.1}}, 0.1, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(mprk43_step(sys, Vector{{0.9, 0.1}}, 0.0, spec), std::invalid_argument);
  CHECK_THROWS_AS(mprk43_step(sys, Vector{{0.9, 0.1}}, -1.0, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(mprk43_step(sys, Vector::Ones(3), 0.1, spec), std::invalid_argument);
  CHECK_THROWS_AS(mprk43_step(sys, Vector{{0.9, 0.1}}, 0.1, mprk22(1.0)),
                  std::invalid_argument);
}

TEST_CASE("second-order steps stay positive and conservative at any step size") {
  const PDSystem sys = linear_exchange();
  const Vector y{{0.9, 0.1}};
  for (const double dt : {1e-6, 0.1, 10.0, 100.0, 1e6}) {
    CAPTURE(dt);
    const auto [out, diag] = mprk22_step(sys, y, dt, 1.0, 1);
    CHECK(out.minCoeff() > 0.0);
    CHECK(out.maxCoeff() < 1.0);
    CHECK(std::abs(out.sum() - 1.0) <= 1e-14);
  }
}

TEST_CASE("first-order step on a large interval") {
  const PDSystem sys = linear_exchange();
  const Vector out = mpe_step(sys, Vector{{0.9, 0.1}}, 10.0);
  CHECK(out.minCoeff() > 0.0);
  CHECK(std::abs(out.sum() - 1.0) <= 1e-14);
}

TEST_CASE("third-order step on the stiff start") {
  const PDSystem sys = robertson();
  const Vector y = sys.default_initial;
  for (const auto& spec : named_mprk43_schemes()) {
    CAPTURE(scheme_id(spec));
    const auto [out, diag] = mprk43_step(sys, y, 1e4, spec);
    CHECK(out.minCoeff() > 0.0);
    CHECK(std::abs(out.sum() - 1.0) <= 1e-13);
  }
}

TEST_CASE("positivity and conservation across the sampling grid") {
  const std::vector<PDSystem> problems = {linear_exchange(), algal_bloom(), brusselator(),
                                          robertson(), monomial_pair({1, 2, 1.0, 2, 3})};
  const auto schemes = all_named_schemes();
  for (const PDSystem& sys : problems) {
    const auto states = test_util::random_states(sys.dim, 5, 1e-3, 1e3, 11);
    for (const auto& spec : schemes) {
      for (const double dt : {1e-6, 1e-2, 1.0, 1e3, 1e6}) {
        for (const Vector& y : states) {
          CAPTURE(sys.name);
          CAPTURE(scheme_id(spec));
          CAPTURE(dt);
          const auto [out, diag] = step(sys, y, dt, spec);
          REQUIRE(out.minCoeff() > 0.0);
          REQUIRE(relative_sum_drift(y, out) <= 1e-12);
          if (diag.stage2.size() > 0) REQUIRE(diag.stage2.minCoeff() > 0.0);
          if (diag.stage3.size() > 0) REQUIRE(diag.stage3.minCoeff() > 0.0);
          if (spec.delta == 1 && diag.stage2.size() > 0) {
            REQUIRE(relative_sum_drift(y, diag.stage2) <= 1e-12);
          }
          if (spec.delta == 1 && diag.stage3.size() > 0) {
            REQUIRE(relative_sum_drift(y, diag.stage3) <= 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("weight denominators are positive and recorded") {
  const PDSystem sys = algal_bloom();
  const Vector y = sys.default_initial;
  const auto [out, diag] = mprk43_step(sys, y, 0.5, mprk43ii(0.5));
  CHECK(diag.pwd_pi.minCoeff() > 0.0);
  CHECK(diag.pwd_rho.minCoeff() > 0.0);
  CHECK(diag.pwd_mu.minCoeff() > 0.0);
  CHECK(diag.pwd_sigma.minCoeff() > 0.0);
  CHECK(diag.full_matrices.size() == 4);  // delta = 1: both stages, sigma, final
  CHECK(diag.colsum_deviation.size() == 4);

  const auto [out0, diag0] = mprk43_step(sys, y, 0.5, mprk43ii(0.5, 0));
  CHECK(diag0.full_matrices.size() == 2);  // ncs: sigma and final only
  CHECK(out0.minCoeff() > 0.0);
}

TEST_CASE("one-step accuracy on the monomial problem") {
  // The decaying constituent of the exponent-1 pair has solution exp(-t).
  // The error magnitude is pinned against an independent straight-from-the-
  // update-formula evaluation (1.6166e-5 at dt = 0.1).
  const PDSystem sys = monomial_pair({1, 2, 1.0, 1, 2});
  const Vector unit = Vector::Ones(2);
  const SchemeSpec heun = mprk43i(1.0, 0.5);
  const auto [out, diag] = mprk43_step(sys, unit, 0.1, heun);
  CHECK(std::abs(out[0] - std::exp(-0.1)) <= 2e-5);
}

TEST_CASE("one-step error contracts at fourth order") {
  for (const int kappa : {1, 2}) {
    const PDSystem sys = monomial_pair({1, 2, 1.0, kappa, 2});
    const Vector unit = Vector::Ones(2);
    for (const auto& spec : named_mprk43_schemes()) {
      CAPTURE(kappa);
      CAPTURE(scheme_id(spec));
      const double dt = 0.05;
      const auto coarse = mprk43_step(sys, unit, dt, spec).first;
      const auto fine = mprk43_step(sys, unit, dt / 2.0, spec).first;
      const double err_coarse =
          (coarse - exact_solution(sys, dt, unit)).cwiseAbs().maxCoeff();
      const double err_fine =
          (fine - exact_solution(sys, dt / 2.0, unit)).cwiseAbs().maxCoeff();
      const double ratio = err_coarse / err_fine;
      CHECK(ratio >= 13.0);
      CHECK(ratio <= 19.0);
    }
  }
}

TEST_CASE("stage variants agree to high order in the step size") {
  const PDSystem sys = linear_exchange();
  const Vector y{{0.9, 0.1}};
  for (const auto& [conservative, explicit_stages] :
       {std::pair{mprk43i(1.0, 0.5, 1), mprk43i(1.0, 0.5, 0)},
        std::pair{mprk43i(0.5, 0.75, 1), mprk43i(0.5, 0.75, 0)},
        std::pair{mprk43ii(0.5, 1), mprk43ii(0.5, 0)}}) {
    CAPTURE(scheme_id(conservative));
    std::vector<double> dts, diffs;
    for (int k = 0; k < 6; ++k) {
      const double dt = 0.2 / (1 << k);
      const Vector a = mprk43_step(sys, y, dt, conservative).first;
      const Vector b = mprk43_step(sys, y, dt, explicit_stages).first;
      dts.push_back(dt);
      diffs.push_back((a - b).cwiseAbs().maxCoeff());
    }
    CHECK(fit_log_slope(dts, diffs) >= 2.7);
  }
}

TEST_CASE("sigma system reproduces the embedded second-order step") {
  const std::vector<std::pair<PDSystem, Vector>> cases = {
      {linear_exchange(), Vector{{0.9, 0.1}}},
      {robertson(), Vector{{0.5, 0.3, 0.2}}},
      {algal_bloom(), Vector{{9.98, 0.01, 0.01}}},
  };
  for (const auto& [sys, y] : cases) {
    for (const auto& spec : named_mprk43_schemes()) {
      if (spec.delta != 1) continue;
      for (const double dt : {1e-3, 0.1, 2.0, 50.0}) {
        CAPTURE(sys.name);
        CAPTURE(scheme_id(spec));
        CAPTURE(dt);
        const auto diag = mprk43_step(sys, y, dt, spec).second;
        const Vector embedded =
            mprk22_step(sys, y, dt, spec.tableau.a21, 1).first;
        CHECK(test_util::within_ulps(diag.pwd_sigma, embedded, 1));
      }
    }
  }
}

TEST_CASE("weight denominators do not depend on the third stage") {
  const PDSystem sys = algal_bloom();
  const Vector y = sys.default_initial;
  const SchemeSpec spec = mprk43ii(0.5);
  const auto [out, diag] = mprk43_step(sys, y, 0.7, spec);

  Vector perturbed = diag.stage3;
  perturbed[1] *= 1.5;
  const auto [out2, diag2] =
      detail::mprk43_step_impl(sys, y, 0.7, spec, &perturbed);

  CHECK(diag2.pwd_pi == diag.pwd_pi);
  CHECK(diag2.pwd_rho == diag.pwd_rho);
  CHECK(diag2.pwd_mu == diag.pwd_mu);
  CHECK(diag2.pwd_sigma == diag.pwd_sigma);
  CHECK(out2 != out);  // the final stage does consume it
}

TEST_CASE("integrate matches a single step on a one-interval grid") {
  const PDSystem sys = linear_exchange();
  const Vector y{{0.9, 0.1}};
  const SchemeSpec spec = mprk43i(1.0, 0.5);
  const Trajectory traj = integrate(sys, y, {0.0, 0.4}, spec);
  const Vector direct = mprk43_step(sys, y, 0.4, spec).first;
  CHECK(traj.states.size() == 2);
  CHECK(traj.states.back() == direct);
}

TEST_CASE("integrate stays positive and conservative on coarse grids") {
  const PDSystem sys = linear_exchange();
  const Vector y{{0.9, 0.1}};
  const SchemeSpec spec = mprk43ii(0.5);
  for (const auto& grid :
       {std::vector<double>{0.0, 1.75}, std::vector<double>{0.0, 0.875, 1.75}}) {
    const Trajectory traj = integrate(sys, y, grid, spec, true);
    CHECK(traj.diagnostics.size() == grid.size() - 1);
    for (const Vector& state : traj.states) {
      CHECK(state.minCoeff() > 0.0);
      CHECK(relative_sum_drift(y, state) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(integrate(sys, y, {0.0, 0.5, 0.5}, spec), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, y, {}, spec), std::invalid_argument);
}

TEST_CASE("geometric grid accumulation") {
  const auto grid = geometric_grid(0.0, 1.0, 2.0, 7.0);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0] == 0.0);
  CHECK(grid[1] == 1.0);
  CHECK(grid[2] == 3.0);
  CHECK(grid[3] == 7.0);

  CHECK(geometric_grid(0.0, 10.0, 4.0, 5.0).size() == 2);  // first step overshoots
  CHECK(geometric_grid(0.0, 1.0, 2.0, 1.0).size() == 2);
  CHECK(geometric_grid(0.0, 1.0, 2.0, 2.5).size() == 3);

  // Ratio-4 traversal of the stiff benchmark window: 29 time levels.
  CHECK(geometric_grid(1e-6, 1e-6, 4.0, 1e10).size() == 29);

  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 1.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(0.0, -1.0, 2.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("uniform grids hit the endpoint exactly") {
  const auto clipped = uniform_grid(0.0, 1.0, 0.3);
  REQUIRE(clipped.size() == 5);
  CHECK(clipped.back() == 1.0);
  CHECK(clipped[3] == doctest::Approx(0.9));

  const auto exact = uniform_grid(0.0, 1.0, 0.25);
  CHECK(exact.size() == 5);
  CHECK(exact.back() == 1.0);

  const auto counted = uniform_grid_steps(0.0, 1.75, 8);
  CHECK(counted.size() == 9);
  CHECK(counted.front() == 0.0);
  CHECK(counted.back() == 1.75);
}

TEST_CASE("underflow clamps are counted, not fatal") {
  // Enormous rate * step drives the squared stage ratio in the weight
  // denominators below the double range; the clamp keeps the step usable.
  const PDSystem sys = monomial_pair({1, 2, 1.0, 2, 2});
  const Vector y = Vector::Ones(2);
  const auto [out, diag] = step(sys, y, 1e160, mprk43i(0.5, 0.75));
  CHECK(diag.underflow_clamps > 0);
  CHECK(out.minCoeff() > 0.0);
  CHECK(relative_sum_drift(y, out) <= 1e-12);
}

}  // TEST_SUITE
