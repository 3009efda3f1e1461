#include "mprk/csv.hpp"
#include "mprk/harness.hpp"
#include "mprk/linalg.hpp"
#include "mprk/pds.hpp"
#include "mprk/reference.hpp"
#include "mprk/schemes.hpp"
#include "mprk/tableau.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <ostream>

namespace {

using namespace mprk;

/// Stream to --out when given, stdout otherwise.
class OutputTarget {
public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

int run_solve(const std::string& problem, const std::string& scheme, double dt,
              double t_end, double t0, const std::string& out) {
  const PDSystem sys = builtin(problem);
  const SchemeSpec spec = parse_scheme(scheme);
  const auto grid = uniform_grid(t0, t_end, dt);
  const Trajectory traj = integrate(sys, sys.default_initial, grid, spec);
  OutputTarget target(out);
  write_trajectory_csv(target.stream(), traj);
  return 0;
}

int run_convergence(const std::string& problem, const std::string& scheme, double dt0,
                    int levels, double t_end, const std::string& out) {
  const PDSystem sys = builtin(problem);
  const SchemeSpec spec = parse_scheme(scheme);
  const ConvergenceReport report =
      convergence_study(sys, sys.default_initial, t_end, spec, dt0, levels);
  OutputTarget target(out);
  auto& os = target.stream();
  os << "dt,E,slope_cumulative\n";
  for (std::size_t k = 0; k < report.dt.size(); ++k) {
    os << format_double(report.dt[k]) << "," << format_double(report.error[k]) << ","
       << format_double(report.slope_cumulative[k]) << "\n";
  }
  return 0;
}

int run_robertson(const std::string& scheme, double dt0, double ratio, double t_end,
                  const std::string& out) {
  const PDSystem sys = robertson();
  const SchemeSpec spec = parse_scheme(scheme);
  const double t0 = 1e-6;
  const auto grid = geometric_grid(t0, dt0, ratio, t_end);
  const Trajectory traj = integrate(sys, sys.default_initial, grid, spec);

  OutputTarget target(out);
  write_trajectory_csv(target.stream(), traj);

  double min_component = std::numeric_limits<double>::infinity();
  double drift = 0.0;
  const double total0 = traj.states.front().sum();
  for (const auto& state : traj.states) {
    min_component = std::min(min_component, state.minCoeff());
    drift = std::max(drift, std::abs(state.sum() - total0) / total0);
  }
  std::cout << "steps,min_component,conservation_drift\n"
            << traj.times.size() << "," << format_double(min_component) << ","
            << format_double(drift) << "\n";
  return 0;
}

void print_tableau(const Tableau3& t, const std::string& title, const std::string& out) {
  const auto residuals = satisfies_order3(t);
  double max_residual = 0.0;
  for (const double r : residuals) max_residual = std::max(max_residual, std::abs(r));
  const bool admissible = mprk43_admissible(t);

  std::cout << title << "\n";
  std::cout << std::left;
  std::cout << "  " << std::setw(28) << ("a21 = " + format_double(t.a21))
            << "b1 = " << format_double(t.b1) << "\n";
  std::cout << "  " << std::setw(28) << ("a31 = " + format_double(t.a31))
            << "b2 = " << format_double(t.b2) << "\n";
  std::cout << "  " << std::setw(28) << ("a32 = " + format_double(t.a32))
            << "b3 = " << format_double(t.b3) << "\n";
  std::cout << "  " << std::setw(28) << ("c2  = " + format_double(t.c2()))
            << "c3 = " << format_double(t.c3()) << "\n";
  std::cout << "  order-3 residuals:";
  for (const double r : residuals) std::cout << " " << format_double(r);
  std::cout << "  (max " << format_double(max_residual) << ")\n";
  std::cout << "  admissible: " << (admissible ? "yes" : "no") << "\n";
  if (admissible) {
    const DerivedParams d = derived_params(t);
    std::cout << "  derived: p = " << format_double(d.p) << ", q = " << format_double(d.q)
              << ", beta1 = " << format_double(d.beta1)
              << ", beta2 = " << format_double(d.beta2) << "\n";
  }
  if (!out.empty()) {
    OutputTarget target(out);
    auto& os = target.stream();
    os << "a21,a31,a32,b1,b2,b3,residual_bsum,residual_bc,residual_bc2,residual_aab,"
          "admissible\n";
    os << format_double(t.a21) << "," << format_double(t.a31) << ","
       << format_double(t.a32) << "," << format_double(t.b1) << ","
       << format_double(t.b2) << "," << format_double(t.b3) << ","
       << format_double(residuals[2]) << "," << format_double(residuals[3]) << ","
       << format_double(residuals[4]) << "," << format_double(residuals[5]) << ","
       << (admissible ? 1 : 0) << "\n";
  }
}

int run_feasibility(double alpha_min, double alpha_max, double beta_min, double beta_max,
                    int resolution, const std::string& out) {
  const auto cells = feasibility_map(alpha_min, alpha_max, beta_min, beta_max, resolution);
  OutputTarget target(out);
  auto& os = target.stream();
  os << "alpha,beta,feasible,b2_eq_b3\n";
  for (const auto& cell : cells) {
    os << format_double(cell.alpha) << "," << format_double(cell.beta) << ","
       << (cell.feasible ? 1 : 0) << "," << (cell.b2_eq_b3 ? 1 : 0) << "\n";
  }
  return 0;
}

int run_diagnose(const std::string& problem, const std::string& scheme, double dt0,
                 int levels) {
  const PDSystem sys = builtin(problem);
  const SchemeSpec spec = parse_scheme(scheme);
  if (levels < 2) throw std::invalid_argument("diagnose: need at least two levels");
  std::vector<double> dts;
  for (int k = 0; k < levels; ++k) dts.push_back(dt0 / static_cast<double>(1L << k));
  const DenominatorProbeReport report =
      probe_denominator_orders(sys, sys.default_initial, spec, dts);

  std::cout << "denominator order probes for " << scheme_id(spec) << " on " << sys.name
            << "\n";
  std::cout << "  (a) first-stage denominator deviation: "
            << format_double(report.max_pi_deviation) << " ("
            << (report.pass_pi ? "pass" : "FAIL") << ")\n";
  std::cout << "  (b) third-stage denominator slope:     "
            << format_double(report.slope_rho) << " (need >= 0.9, "
            << (report.pass_rho ? "pass" : "FAIL") << ")\n";
  std::cout << "  (c) weighted stage condition slope:    "
            << format_double(report.slope_condition) << " (need >= 1.9, "
            << (report.pass_condition ? "pass" : "FAIL") << ")\n";
  std::cout << "  (d) sigma accuracy slope:              "
            << format_double(report.slope_sigma) << " (need >= 2.9, "
            << (report.pass_sigma ? "pass" : "FAIL") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positivity-preserving conservative integrators for "
               "production-destruction systems"};
  app.require_subcommand(1);

  std::string problem, scheme, out;
  double dt = 0, dt0 = 0, t_end = 0, t0 = 0;
  int levels = 0;

  auto* solve = app.add_subcommand("solve", "Integrate on a uniform grid, emit CSV");
  solve->add_option("--problem", problem)->required();
  solve->add_option("--scheme", scheme)->required();
  solve->add_option("--dt", dt)->required();
  solve->add_option("--t-end", t_end)->required();
  solve->add_option("--t0", t0)->default_val(0.0);
  solve->add_option("--out", out);

  auto* conv = app.add_subcommand("convergence", "Error versus step size study");
  conv->add_option("--problem", problem)->required();
  conv->add_option("--scheme", scheme)->required();
  conv->add_option("--dt0", dt0)->required();
  conv->add_option("--levels", levels)->required();
  conv->add_option("--t-end", t_end)->required();
  conv->add_option("--out", out);

  double ratio = 4.0;
  auto* rob = app.add_subcommand("robertson", "Stiff run on the growing geometric grid");
  rob->add_option("--scheme", scheme)->required();
  rob->add_option("--dt0", dt0)->default_val(1e-6);
  rob->add_option("--ratio", ratio)->default_val(4.0);
  rob->add_option("--t-end", t_end)->default_val(1e10);
  rob->add_option("--out", out);

  double alpha = 0, beta = 0, gamma = 0;
  auto* tab = app.add_subcommand("tableau", "Construct and check a tableau");
  tab->require_subcommand(1);
  auto* case1 = tab->add_subcommand("case1", "Two-parameter family");
  case1->add_option("--alpha", alpha)->required();
  case1->add_option("--beta", beta)->required();
  case1->add_option("--out", out);
  auto* case2 = tab->add_subcommand("case2", "One-parameter family");
  case2->add_option("--gamma", gamma)->required();
  case2->add_option("--out", out);

  double alpha_min = 0, alpha_max = 0, beta_min = 0, beta_max = 0;
  int resolution = 0;
  auto* feas = app.add_subcommand("feasibility", "Sample the non-negativity region");
  feas->add_option("--alpha-min", alpha_min)->required();
  feas->add_option("--alpha-max", alpha_max)->required();
  feas->add_option("--beta-min", beta_min)->required();
  feas->add_option("--beta-max", beta_max)->required();
  feas->add_option("--resolution", resolution)->required();
  feas->add_option("--out", out);

  auto* diag = app.add_subcommand("diagnose", "Order probes of the weight denominators");
  diag->add_option("--problem", problem)->required();
  diag->add_option("--scheme", scheme)->required();
  diag->add_option("--dt0", dt0)->required();
  diag->add_option("--levels", levels)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(problem, scheme, dt, t_end, t0, out);
    if (conv->parsed()) return run_convergence(problem, scheme, dt0, levels, t_end, out);
    if (rob->parsed()) return run_robertson(scheme, dt0, ratio, t_end, out);
    if (tab->parsed()) {
      if (case1->parsed()) {
        print_tableau(from_case1(alpha, beta),
                      "tableau case1(alpha=" + format_double(alpha) +
                          ", beta=" + format_double(beta) + ")",
                      out);
        std::cout << "  feasible: " << (feasible_case1(alpha, beta) ? "yes" : "no")
                  << "\n";
      } else {
        print_tableau(from_case2(gamma),
                      "tableau case2(gamma=" + format_double(gamma) + ")", out);
      }
      return 0;
    }
    if (feas->parsed()) {
      return run_feasibility(alpha_min, alpha_max, beta_min, beta_max, resolution, out);
    }
    if (diag->parsed()) return run_diagnose(problem, scheme, dt0, levels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
