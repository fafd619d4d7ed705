#pragma once

#include "wavelaw/config.hpp"
#include "wavelaw/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <vector>

namespace wavelaw {

/// Process exit codes of the batch driver.
enum ExitCode : int { kExitOk = 0, kExitGuard = 1, kExitSuiteFailure = 2 };

struct RunOutcome {
  PeriodicGrid grid;
  std::vector<AuditSample> samples;
  std::optional<DensityReport> report;
  std::vector<ProbeReport> probes;
  std::vector<SuiteLine> strict, identity;
  bool probes_pass = true;
  SurfaceState final_state;
  std::optional<GuardViolation> guard;
  int exit_code = kExitOk;
};

inline SurfaceState initial_state(const RunConfig& cfg, PeriodicGrid& grid) {
  const auto& sc = cfg.scenario;
  switch (sc.kind) {
    case ScenarioKind::rest:
      return scenario_rest(grid);
    case ScenarioKind::linear_wave:
      return scenario_linear_wave(grid, sc.epsilon, sc.mode_m, sc.mode_n, sc.phase);
    case ScenarioKind::gaussian_packet:
      return scenario_gaussian_packet(grid, sc.amplitude, sc.width, sc.center_x.value_or(0.5 * grid.lx),
                                      sc.center_y.value_or(0.5 * grid.ly), sc.remove_mean);
    case ScenarioKind::snapshot: {
      auto snap = load_snapshot(sc.snapshot);
      const auto& a = snap.grid;
      const auto& b = grid;
      if (a.lx != b.lx || a.ly != b.ly || a.nx != b.nx || a.ny != b.ny || a.depth != b.depth ||
          a.gravity != b.gravity || a.density != b.density || a.surface_tension != b.surface_tension)
        throw ConfigError("snapshot grid does not match [grid]");
      return snap.state;
    }
  }
  throw std::logic_error("unhandled scenario");
}

inline void print_summary(std::ostream& log, const RunOutcome& out, double amplitude) {
  if (!out.report) {
    log << "audit: fewer than 5 samples, no report\n";
    return;
  }
  const auto& rep = *out.report;
  log << fmt::format("{:>4} {:>24} {:>24} {:>24} {:>24} {:>14}\n", "law", "max|I-I0|", "max|res|",
                     "max|res-mean|", "mean res", "scale");
  for (int k = 0; k < kLawCount; ++k) {
    const auto& d = rep.drift_metrics[k];
    log << fmt::format("{:>4} {:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e} {:>14.6e}\n", k + 1,
                       d.max_integral_drift, d.max_abs_residual, d.max_residual_deviation, d.mean_residual,
                       law_scale(out.grid, rep, k + 1, amplitude));
  }
  auto lines = [&](const char* name, const std::vector<SuiteLine>& suite) {
    for (const auto& s : suite)
      log << fmt::format("{} law {:>2}: {:.3e} vs bound {:.3e} {}\n", name, s.law, s.value, s.bound,
                         s.pass ? "PASS" : "FAIL");
  };
  lines("strict  ", out.strict);
  lines("identity", out.identity);
  for (const auto& p : out.probes)
    log << fmt::format("probe {:<12} r1 {:.3e}  r2 {:.3e} {}\n", describe(p.spec), p.worst_ratio_1,
                       p.worst_ratio_2,
                       p.worst_ratio_1 < kProbeTolerance && p.worst_ratio_2 < kProbeTolerance ? "PASS" : "FAIL");
}

/// Audits collected samples and applies the enabled suites.
inline void finish_audit(RunOutcome& out, double sample_dt, double reference_amplitude, bool strict,
                         bool identity, bool probes) {
  if (out.samples.size() < 5) return;
  out.report = audit_trajectory(out.grid, out.samples, sample_dt);
  const double amp = reference_amplitude > 0.0 ? reference_amplitude
                                               : out.samples.front().state.eta.abs().maxCoeff();
  if (strict) out.strict = strict_suite(out.grid, *out.report, amp);
  if (identity) out.identity = identity_suite(out.grid, *out.report, amp);
  if (probes) {
    for (const auto& spec : standard_probes()) {
      out.probes.push_back(audit_probe(out.grid, out.samples, sample_dt, spec));
      const auto& p = out.probes.back();
      out.probes_pass = out.probes_pass && p.worst_ratio_1 < kProbeTolerance && p.worst_ratio_2 < kProbeTolerance;
    }
  }
}

inline int suite_exit_code(const RunOutcome& out) {
  if (out.guard) return kExitGuard;
  bool ok = out.probes_pass;
  for (const auto& s : out.strict) ok = ok && s.pass;
  for (const auto& s : out.identity) ok = ok && s.pass;
  return ok ? kExitOk : kExitSuiteFailure;
}

inline double reference_amplitude_of(const RunConfig& cfg, const RunOutcome& out) {
  if (cfg.reference_amplitude > 0.0) return cfg.reference_amplitude;
  return out.samples.empty() ? 0.0 : out.samples.front().state.eta.abs().maxCoeff();
}

/// Steps the configured scenario, streams audited states to the trajectory
/// file and writes the CSV report. Samples are kept in the returned outcome.
inline RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  RunOutcome out;
  out.grid = cfg.grid;
  const auto& grid = out.grid;
  SurfaceState state = initial_state(cfg, out.grid);
  validate_state(grid, state);

  std::ofstream trajectory;
  if (!cfg.trajectory_path.empty()) {
    trajectory.open(cfg.trajectory_path, std::ios::binary | std::ios::trunc);
    if (!trajectory) throw FormatError("cannot open '" + cfg.trajectory_path + "'");
  }

  const double t0 = state.t;
  const long steps = std::lround((cfg.t_end - t0) / cfg.dt);
  if (steps < 1) throw ConfigError("time.t_end is not after the initial time");
  try {
    check_guard(grid, state);
    for (long i = 0; i <= steps; ++i) {
      state.t = t0 + static_cast<double>(i) * cfg.dt;
      SolveDiagnostics kin;
      const RatePair r = rates(grid, state, cfg.kinematic_solver, &kin);
      if (i % cfg.audit_cadence == 0) {
        out.samples.push_back(make_audit_sample(grid, state, r, kin));
        if (trajectory.is_open()) write_snapshot(trajectory, grid, state);
      }
      if (i == steps) break;
      state = step_rk4(grid, state, cfg.dt, cfg.kinematic_solver, &r);
    }
  } catch (const GuardViolation& g) {
    out.guard = g;
    log << "abort: " << g.what() << '\n';
  }
  out.final_state = state;
  if (!cfg.snapshot_path.empty() && !out.guard) save_snapshot(cfg.snapshot_path, grid, state);

  finish_audit(out, cfg.dt * cfg.audit_cadence, reference_amplitude_of(cfg, out), cfg.strict_suite,
               cfg.identity_suite, cfg.probe_suite);
  if (out.report && !cfg.report_path.empty()) {
    std::ofstream csv(cfg.report_path, std::ios::trunc);
    if (!csv) throw FormatError("cannot open '" + cfg.report_path + "'");
    write_report_csv(csv, *out.report);
  }
  if (!out.probes.empty() && !cfg.probe_report_path.empty()) {
    std::ofstream csv(cfg.probe_report_path, std::ios::trunc);
    if (!csv) throw FormatError("cannot open '" + cfg.probe_report_path + "'");
    write_probe_csv(csv, out.report->times, out.probes);
  }
  print_summary(log, out, reference_amplitude_of(cfg, out));
  out.exit_code = suite_exit_code(out);
  return out;
}

/// Rebuilds audit samples from a trajectory file.
inline RunOutcome audit_trajectory_file(const std::string& path, KinematicSolver solver,
                                        double reference_amplitude, bool probes, std::ostream& log) {
  const auto snaps = load_trajectory(path);
  if (snaps.size() < 5) throw FormatError("trajectory holds fewer than 5 samples");
  RunOutcome out;
  out.grid = snaps.front().grid;
  const double spacing = snaps[1].state.t - snaps[0].state.t;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto& g = snaps[i].grid;
    if (g.nx != out.grid.nx || g.ny != out.grid.ny || g.lx != out.grid.lx || g.ly != out.grid.ly)
      throw FormatError("trajectory mixes grids");
    const double expected = snaps[0].state.t + static_cast<double>(i) * spacing;
    if (std::abs(snaps[i].state.t - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw FormatError("trajectory samples are not uniformly spaced");
    out.samples.push_back(make_audit_sample(out.grid, snaps[i].state, solver));
  }
  out.final_state = snaps.back().state;
  finish_audit(out, spacing, reference_amplitude, true, true, probes);
  print_summary(log, out, reference_amplitude > 0.0 ? reference_amplitude
                                                    : out.samples.front().state.eta.abs().maxCoeff());
  out.exit_code = suite_exit_code(out);
  return out;
}

}  // namespace wavelaw
