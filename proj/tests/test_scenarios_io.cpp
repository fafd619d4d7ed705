#include "oracles.hpp"

#include "wavelaw/wavelaw.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace wavelaw;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using oracle::pi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("wavelaw-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string small_wave_config(const TempDir& dir, const std::string& extra = "") {
  return "[grid]\nlx = 2pi\nly = 2pi\nnx = 8\nny = 4\n"
         "[scenario]\nkind = linear_wave\nepsilon = 0.01\nphase = traveling\n"
         "[time]\ndt = 0.05\nt_end = 0.6\n"
         "[output]\ntrajectory = " + dir.file("traj.wvlw") + "\nreport = " + dir.file("report.csv") +
         "\nsnapshot = " + dir.file("final.wvlw") + "\n" + extra;
}

}  // namespace

TEST_CASE("rest and linear-wave scenarios", "[scenarios]") {
  const auto g = make_grid(2 * pi, 2 * pi, 16, 8, 1, 9.81, 1000, 0);
  const auto rest = scenario_rest(g);
  CHECK(rest.t == 0.0);
  CHECK(oracle::max_abs(rest.eta) == 0.0);
  CHECK(oracle::max_abs(rest.q) == 0.0);

  const auto w = scenario_linear_wave(g, 1e-3, 1, 0, WavePhase::standing);
  CHECK_THAT(w.eta.maxCoeff(), WithinRel(1e-3, 1e-15));
  CHECK(oracle::max_abs(w.q) == 0.0);

  const auto z = scenario_linear_wave(g, 0.0, 2, 1, WavePhase::traveling);
  CHECK(oracle::max_abs(z.eta) == 0.0);
  CHECK(oracle::max_abs(z.q) == 0.0);

  CHECK_THROWS_AS(scenario_linear_wave(g, 1e-3, 8, 0, WavePhase::standing), std::invalid_argument);
  CHECK_THROWS_AS(scenario_linear_wave(g, 1e-3, 0, 0, WavePhase::standing), std::invalid_argument);
  CHECK_THROWS_AS(scenario_linear_wave(g, 0.2, 3, 0, WavePhase::standing), std::invalid_argument);
}

TEST_CASE("travelling wave crest moves at the linear phase speed", "[scenarios]") {
  const auto g = make_grid(2 * pi, 2 * pi, 16, 4, 1, 9.81, 1000, 0);
  const double eps = 1e-3, omega = std::sqrt(g.gravity * std::tanh(1.0)), T = 2 * pi / omega;
  SurfaceState s = scenario_linear_wave(g, eps, 1, 0, WavePhase::traveling);
  const int steps = 100;
  double worst = 0.0;
  for (int i = 1; i <= steps; ++i) {
    s = step_rk4(g, s, T / steps);
    const double t = i * T / steps;
    // Crest position from the phase of the first harmonic.
    const double c = cosine_amplitude(g, s.eta, 1, 0);
    const double sn = 2.0 * (s.eta * sample(g, [](double x, double) { return std::sin(x); })).sum() / g.size();
    const double crest = std::atan2(sn, c);
    const double expected = std::remainder(omega * t, 2 * pi);
    worst = std::max(worst, std::abs(std::remainder(crest - expected, 2 * pi)));
  }
  CHECK(worst < 10 * eps);
}

TEST_CASE("Gaussian packet construction", "[scenarios]") {
  const double s = 0.25;
  const auto g = make_grid(16 * s, 16 * s, 32, 32, 1, 9.81, 1000, 0);
  const double A = 0.01;
  const auto p = scenario_gaussian_packet(g, A, s);
  CHECK(std::abs(integrate_surface(g, p.eta)) < 1e-18);
  CHECK(oracle::max_abs(p.q) == 0.0);
  CHECK_THAT(p.eta.maxCoeff(), WithinRel(A * (1 - 2 * pi * s * s / g.area()), 1e-12));

  // Tail of the hump before mean removal: the edge midpoints sit 8 s from the
  // centre, where the Gaussian is exactly A exp(-32).
  const auto raw = scenario_gaussian_packet(g, A, s, 0.5 * g.lx, 0.5 * g.ly, false);
  CHECK_THAT(raw.eta[g.index(0, g.ny / 2)], WithinRel(A * std::exp(-32.0), 1e-12));
  double edge = 0.0;
  for (int l = 0; l < g.ny; ++l) edge = std::max({edge, raw.eta[g.index(0, l)], raw.eta[g.index(l, 0)]});
  CHECK(edge <= A * std::exp(-32.0) * (1 + 1e-12));

  CHECK_THROWS_AS(scenario_gaussian_packet(g, A, 0.26), std::invalid_argument);
  CHECK_THROWS_AS(scenario_gaussian_packet(g, 0.3, s), std::invalid_argument);
}

TEST_CASE("config parsing", "[config]") {
  const auto cfg = parse_run_config_string(config_template());
  CHECK(cfg.grid.nx == 32);
  CHECK_THAT(cfg.grid.lx, WithinRel(2 * pi, 1e-15));
  CHECK(cfg.scenario.kind == ScenarioKind::linear_wave);
  CHECK(cfg.kinematic_solver == KinematicSolver::nonlocal);
  CHECK(cfg.dt == 0.01);

  const auto c2 = parse_run_config_string(
      "[grid]\nlx = 0.5*pi ; comment\nnx = 8\nny = 8\n[time]\ndt = 1e-2\nt_end = pi\n[solver]\nkinematic = dno\n");
  CHECK_THAT(c2.grid.lx, WithinRel(0.5 * pi, 1e-15));
  CHECK_THAT(c2.t_end, WithinRel(pi, 1e-15));
  CHECK(c2.kinematic_solver == KinematicSolver::dno);
  CHECK(c2.scenario.kind == ScenarioKind::rest);

  const std::string ok = "[time]\ndt = 0.1\nt_end = 1\n";
  CHECK_THROWS_AS(parse_run_config_string(ok + "[bogus]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[grid]\nnz = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[grid]\nnx = 7\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[grid]\nnx = 8.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[grid]\nlx = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[scenario]\nkind = tsunami\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[audit]\nstrict = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[solver]\nkinematic = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string("[time]\ndt = 0\nt_end = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string("[time]\ndt = -0.5\nt_end = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string("[time]\ndt = 0.5\nt_end = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string(ok + "[scenario]\nkind = snapshot\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_string("[time]\ndt = 0.1\nt_end = 1\naudit_cadence = 0\n"), ConfigError);
}

TEST_CASE("run rejects a non-positive step before computing", "[config]") {
  TempDir dir;
  RunConfig cfg;
  cfg.grid = make_grid(2 * pi, 2 * pi, 8, 8, 1, 9.81, 1000, 0);
  cfg.dt = 0.0;
  cfg.t_end = 1.0;
  cfg.trajectory_path = dir.file("never.wvlw");
  std::ostringstream log;
  CHECK_THROWS_AS(run(cfg, log), ConfigError);
  CHECK_FALSE(fs::exists(cfg.trajectory_path));
}

TEST_CASE("snapshot round trip", "[io]") {
  const auto g = make_grid(3.0, 2.0, 8, 6, 0.7, 9.81, 1025, 0.07);
  const SurfaceState st{1.25, 0.01 * oracle::band_limited(g, 3, 2, 51), oracle::band_limited(g, 3, 2, 52)};
  std::stringstream buf;
  write_snapshot(buf, g, st);
  write_snapshot(buf, g, st);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 2 * (4 + 4 + 9 * 8 + 2 * 8 * 48));
  CHECK(bytes.substr(0, 4) == "WVLW");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);

  Snapshot snap;
  REQUIRE(read_snapshot(buf, snap));
  CHECK(snap.grid.lx == g.lx);
  CHECK(snap.grid.ny == g.ny);
  CHECK(snap.grid.density == g.density);
  CHECK(snap.grid.surface_tension == g.surface_tension);
  CHECK(snap.state.t == st.t);
  CHECK((snap.state.eta == st.eta).all());
  CHECK((snap.state.q == st.q).all());
  REQUIRE(read_snapshot(buf, snap));
  CHECK_FALSE(read_snapshot(buf, snap));

  std::stringstream bad("WVLX" + bytes.substr(4));
  CHECK_THROWS_AS(read_snapshot(bad, snap), FormatError);
  std::stringstream truncated(bytes.substr(0, 100));
  CHECK_THROWS_AS(read_snapshot(truncated, snap), FormatError);
  std::string wrong_version = bytes;
  wrong_version[4] = 2;
  std::stringstream v2(wrong_version);
  CHECK_THROWS_AS(read_snapshot(v2, snap), FormatError);
}

TEST_CASE("snapshot header is little-endian f64", "[io]") {
  const auto g = make_grid(2.0, 2.0, 4, 4, 1.0, 9.81, 1000, 0);
  std::stringstream buf;
  write_snapshot(buf, g, scenario_rest(g));
  const std::string b = buf.str();
  // lx = 2.0 is 0x4000000000000000.
  for (int i = 0; i < 7; ++i) CHECK(b[8 + i] == 0);
  CHECK(static_cast<unsigned char>(b[15]) == 0x40);
}

TEST_CASE("run pipeline writes trajectory, report and snapshot", "[runner]") {
  TempDir dir;
  const auto cfg = parse_run_config_string(small_wave_config(dir));
  std::ostringstream log;
  const auto out = run(cfg, log);
  CHECK(out.samples.size() == 13);
  CHECK(load_trajectory(dir.file("traj.wvlw")).size() == 13);
  const auto fin = load_snapshot(dir.file("final.wvlw"));
  CHECK_THAT(fin.state.t, WithinRel(0.6, 1e-15));

  std::ifstream csv(dir.file("report.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK_THAT(header, ContainsSubstring("time[s]"));
  CHECK_THAT(header, ContainsSubstring("int_T3[m^5/s^2]"));
  CHECK_THAT(header, ContainsSubstring("residual_12[m^5/s^2]"));
  CHECK_THAT(header, ContainsSubstring("cond_kinematic[-]"));
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 13);
  CHECK_THAT(log.str(), ContainsSubstring("strict   law  3"));
}

TEST_CASE("rest run reports zero drift", "[runner]") {
  TempDir dir;
  const auto cfg = parse_run_config_string("[grid]\nnx = 8\nny = 8\n[time]\ndt = 0.1\nt_end = 1\n"
                                           "[audit]\nreference_amplitude = 0.01\n[output]\ntrajectory = " +
                                           dir.file("t.wvlw") + "\nreport = " + dir.file("r.csv") + "\n");
  std::ostringstream log;
  const auto out = run(cfg, log);
  CHECK(out.exit_code == kExitOk);
  REQUIRE(out.report);
  for (const auto& d : out.report->drift_metrics) {
    CHECK(d.max_integral_drift == 0.0);
    CHECK(d.max_residual_deviation == 0.0);
  }
}

TEST_CASE("guard violation aborts the run with exit code 1", "[runner]") {
  TempDir dir;
  // An amplitude near the slope limit steepens past it within a few steps.
  const auto cfg = parse_run_config_string(
      "[grid]\nnx = 16\nny = 4\n[scenario]\nkind = linear_wave\nepsilon = 0.16\nmode_m = 3\nphase = traveling\n"
      "[time]\ndt = 0.02\nt_end = 3\n[output]\ntrajectory = " + dir.file("t.wvlw") + "\nreport = " +
      dir.file("r.csv") + "\n");
  std::ostringstream log;
  const auto out = run(cfg, log);
  REQUIRE(out.guard);
  CHECK(out.exit_code == kExitGuard);
  CHECK(out.guard->metric() == "max |grad eta|");
  CHECK_THAT(log.str(), ContainsSubstring("abort: guard violated"));
}

TEST_CASE("single-thread runs are byte-identical", "[runner]") {
  TempDir a, b;
  std::ostringstream log;
  run(parse_run_config_string(small_wave_config(a)), log);
  run(parse_run_config_string(small_wave_config(b)), log);
  CHECK(slurp(a.file("traj.wvlw")) == slurp(b.file("traj.wvlw")));
  CHECK(slurp(a.file("report.csv")) == slurp(b.file("report.csv")));
  CHECK(slurp(a.file("final.wvlw")) == slurp(b.file("final.wvlw")));
}

TEST_CASE("restart from a snapshot reproduces the density series", "[runner]") {
  TempDir full, first, second;
  std::ostringstream log;
  const auto whole = run(parse_run_config_string(small_wave_config(full)), log);

  auto half_cfg = small_wave_config(first);
  half_cfg.replace(half_cfg.find("t_end = 0.6"), 11, "t_end = 0.3");
  const auto a = run(parse_run_config_string(half_cfg), log);

  const std::string resumed = "[grid]\nlx = 2pi\nly = 2pi\nnx = 8\nny = 4\n[scenario]\nkind = snapshot\nsnapshot = " +
                              first.file("final.wvlw") + "\n[time]\ndt = 0.05\nt_end = 0.6\n[output]\ntrajectory = " +
                              second.file("traj.wvlw") + "\nreport = " + second.file("report.csv") + "\n";
  const auto b = run(parse_run_config_string(resumed), log);
  REQUIRE(a.report);
  REQUIRE(b.report);
  REQUIRE(a.samples.size() + b.samples.size() == whole.samples.size() + 1);

  for (int k = 0; k < kLawCount; ++k) {
    const auto& ref = whole.report->density_integrals[k];
    // Same floor as the audit law scale, g eps^2 Lx Ly.
    double scale = 9.81 * 0.01 * 0.01 * 4 * pi * pi;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    INFO("law " << k + 1);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      CHECK(std::abs(a.report->density_integrals[k][i] - ref[i]) <= 1e-12 * scale);
    for (std::size_t i = 0; i < b.samples.size(); ++i)
      CHECK(std::abs(b.report->density_integrals[k][i] - ref[i + a.samples.size() - 1]) <= 1e-12 * scale);
  }

  const std::string mismatch = "[grid]\nnx = 16\nny = 4\n[scenario]\nkind = snapshot\nsnapshot = " +
                               first.file("final.wvlw") + "\n[time]\ndt = 0.05\nt_end = 0.6\n";
  CHECK_THROWS_AS(run(parse_run_config_string(mismatch), log), ConfigError);
}

TEST_CASE("stored trajectories can be audited again", "[runner]") {
  TempDir dir;
  std::ostringstream log;
  const auto direct = run(parse_run_config_string(small_wave_config(dir)), log);
  const auto again = audit_trajectory_file(dir.file("traj.wvlw"), KinematicSolver::nonlocal, 0.0, false, log);
  REQUIRE(again.report);
  for (int k = 0; k < kLawCount; ++k)
    for (std::size_t i = 0; i < direct.samples.size(); ++i)
      CHECK(again.report->residuals[k][i] == direct.report->residuals[k][i]);
}
