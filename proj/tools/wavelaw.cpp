#include "wavelaw/wavelaw.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <numbers>

namespace {

int run_verb(const std::string& path, std::optional<wavelaw::KinematicSolver> solver, int threads) {
  auto cfg = wavelaw::load_run_config(path);
  if (solver) cfg.kinematic_solver = *solver;
  if (threads > 0) cfg.threads = threads;
  Eigen::setNbThreads(cfg.threads);
  return wavelaw::run(cfg, std::cout).exit_code;
}

int audit_verb(const std::string& trajectory, const std::string& report, double amplitude, bool probes,
               wavelaw::KinematicSolver solver) {
  auto out = wavelaw::audit_trajectory_file(trajectory, solver, amplitude, probes, std::cout);
  if (!report.empty() && out.report) {
    std::ofstream csv(report, std::ios::trunc);
    if (!csv) throw wavelaw::FormatError("cannot open '" + report + "'");
    wavelaw::write_report_csv(csv, *out.report);
  }
  return out.exit_code;
}

int dispersion_verb(int nx, double eps, double depth, double capillarity_ratio, int steps,
                    wavelaw::KinematicSolver solver) {
  // Capillarity is given as (sigma/rho) / g.
  const double rho = 1000.0, g = 9.81;
  const auto grid = wavelaw::make_grid(2.0 * std::numbers::pi, 2.0 * std::numbers::pi, nx, nx, depth, g, rho,
                                       capillarity_ratio * g * rho);
  const auto m = wavelaw::measure_standing_period(grid, eps, 1, 0, steps, solver);
  fmt::print("predicted period {:.12f} s\nmeasured period  {:.12f} s\nrelative error   {:.3e}\n", m.predicted,
             m.measured, m.relative_error());
  const bool ok = m.relative_error() < 1e-3;
  fmt::print("{}\n", ok ? "PASS" : "FAIL");
  return ok ? wavelaw::kExitOk : wavelaw::kExitSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelaw: periodic water-wave simulator and conservation-law auditor"};
  app.require_subcommand(1);
  int threads = 0;
  std::string solver_name;
  app.add_option("--threads", threads, "Worker threads for dense linear algebra")->check(CLI::PositiveNumber);
  app.add_option("--solver", solver_name, "Kinematic solver")->check(CLI::IsMember({"nonlocal", "dno"}));

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a configured scenario and audit it");
  run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

  std::string trajectory, report;
  double amplitude = 0.0;
  bool probes = false;
  auto* audit = app.add_subcommand("audit", "Audit a stored trajectory");
  audit->add_option("trajectory", trajectory, "Trajectory file")->required()->check(CLI::ExistingFile);
  audit->add_option("--report", report, "CSV report path");
  audit->add_option("--amplitude", amplitude, "Reference amplitude for the suite scale (m)");
  audit->add_flag("--probes", probes, "Also run the test-function probes");

  int nx = 32, steps = 200;
  double eps = 1e-3, depth = 1.0, capillarity = 0.0;
  auto* disp = app.add_subcommand("dispersion-check", "Measure the period of a linear standing wave");
  disp->add_option("--nx", nx, "Nodes per side")->check(CLI::Range(4, 256));
  disp->add_option("--epsilon", eps, "Wave amplitude (m)");
  disp->add_option("--depth", depth, "Still-water depth (m)");
  disp->add_option("--capillarity", capillarity, "Ratio (sigma/rho)/g");
  disp->add_option("--steps", steps, "Steps per period");

  auto* tmpl = app.add_subcommand("print-config-template", "Print an annotated configuration");

  CLI11_PARSE(app, argc, argv);

  std::optional<wavelaw::KinematicSolver> solver;
  if (!solver_name.empty()) solver = wavelaw::parse_kinematic_solver(solver_name);
  const auto chosen = solver.value_or(wavelaw::KinematicSolver::nonlocal);
  if (threads > 0) Eigen::setNbThreads(threads);

  try {
    if (*run) return run_verb(config_path, solver, threads);
    if (*audit) return audit_verb(trajectory, report, amplitude, probes, chosen);
    if (*disp) return dispersion_verb(nx, eps, depth, capillarity, steps, chosen);
    if (*tmpl) {
      std::cout << wavelaw::config_template();
      return 0;
    }
  } catch (const wavelaw::GuardViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return wavelaw::kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
