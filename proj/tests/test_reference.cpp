#include "mprk/reference.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mprk;

TEST_SUITE("reference") {

TEST_CASE("matches the linear closed form") {
  const PDSystem sys = linear_exchange();
  const Vector y0{{0.9, 0.1}};
  const std::vector<double> times = {0.0, 0.5, 1.0, 1.75};
  const Trajectory traj = reference_solve(sys, y0, times, ToleranceConfig{});
  REQUIRE(traj.times == times);
  REQUIRE(traj.states.size() == times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Vector truth = exact_solution(sys, times[k], y0);
    CHECK((traj.states[k] - truth).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("matches the monomial closed form") {
  const PDSystem sys = monomial_pair({1, 2, 1.0, 2, 2});
  const Trajectory traj =
      reference_solve(sys, Vector::Ones(2), {0.0, 1.0}, ToleranceConfig{});
  CHECK(std::abs(traj.states.back()[0] - 0.5) < 1e-8);
}

TEST_CASE("a single output time returns the initial state") {
  const PDSystem sys = brusselator();
  const Trajectory traj =
      reference_solve(sys, sys.default_initial, {0.0}, ToleranceConfig{});
  REQUIRE(traj.states.size() == 1);
  CHECK(traj.states.front() == sys.default_initial);
}

TEST_CASE("conserves the component sum on the non-stiff benchmarks") {
  const std::vector<std::pair<PDSystem, double>> cases = {
      {linear_exchange(), 1.75}, {algal_bloom(), 30.0}, {brusselator(), 6.0}};
  for (const auto& [sys, t_end] : cases) {
    CAPTURE(sys.name);
    std::vector<double> times;
    for (int k = 0; k <= 8; ++k) times.push_back(t_end * k / 8.0);
    const Trajectory traj =
        reference_solve(sys, sys.default_initial, times, ToleranceConfig{});
    const double total = sys.default_initial.sum();
    for (const Vector& state : traj.states) {
      CHECK(std::abs(state.sum() - total) <= 1e-8 * total);
    }
  }
}

TEST_CASE("self-convergence under tightened tolerances") {
  const PDSystem sys = algal_bloom();
  const std::vector<double> times = {0.0, 10.0, 20.0, 30.0};
  const Trajectory loose =
      reference_solve(sys, sys.default_initial, times, {1e-10, 1e-10});
  const Trajectory tight =
      reference_solve(sys, sys.default_initial, times, {1e-12, 1e-12});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double scale = tight.states[k].cwiseAbs().maxCoeff();
    CHECK((loose.states[k] - tight.states[k]).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("stiff systems exhaust the explicit pair") {
  const PDSystem sys = robertson();
  CHECK_THROWS_AS(reference_solve(sys, sys.default_initial, {0.0, 10.0},
                                  ToleranceConfig{}, 50000),
                  std::runtime_error);
}

TEST_CASE("input validation") {
  const PDSystem sys = linear_exchange();
  const Vector y0{{0.9, 0.1}};
  CHECK_THROWS_AS(reference_solve(sys, y0, {}, ToleranceConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reference_solve(sys, y0, {0.0, 0.0}, ToleranceConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reference_solve(sys, y0, {1.0, 0.5}, ToleranceConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reference_solve(sys, Vector::Ones(3), {0.0, 1.0}, ToleranceConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reference_solve(sys, y0, {0.0, 1.0}, {0.0, 1e-10}),
                  std::invalid_argument);
}

}  // TEST_SUITE
