#pragma once

#include "wavelaw/dynamics.hpp"
#include "wavelaw/scenarios.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wavelaw {

enum class ScenarioKind { rest, linear_wave, gaussian_packet, snapshot };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioParams {
  ScenarioKind kind = ScenarioKind::rest;
  double epsilon = 1e-3;
  int mode_m = 1;
  int mode_n = 0;
  WavePhase phase = WavePhase::standing;
  double amplitude = 0.01;
  double width = 0.5;
  std::optional<double> center_x;
  std::optional<double> center_y;
  bool remove_mean = true;
  std::string snapshot;
};

struct RunConfig {
  PeriodicGrid grid;
  ScenarioParams scenario;
  double dt = 0.0;
  double t_end = 0.0;
  int audit_cadence = 1;
  KinematicSolver kinematic_solver = KinematicSolver::nonlocal;
  int threads = 1;
  bool strict_suite = true;
  bool identity_suite = true;
  bool probe_suite = false;
  double reference_amplitude = 0.0;  // 0: largest |eta| of the first sample
  std::string trajectory_path = "trajectory.wvlw";
  std::string report_path = "report.csv";
  std::string probe_report_path;
  std::string snapshot_path;
};

namespace detail {

// Numbers may carry a trailing multiple of pi: "2pi", "0.5*pi", "pi".
inline double parse_number(const std::string& key, std::string text) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  text = trim(text);
  double factor = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    text = trim(text.substr(0, text.size() - 2));
    if (!text.empty() && text.back() == '*') text = trim(text.substr(0, text.size() - 1));
    if (text.empty()) return factor;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("'" + key + "': trailing characters in '" + text + "'");
  return v * factor;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("'" + key + "': expected an integer");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(cfg.t_end >= cfg.dt)) throw ConfigError("time.t_end must be at least time.dt");
  if (cfg.audit_cadence < 1) throw ConfigError("time.audit_cadence must be >= 1");
  if (cfg.threads < 1) throw ConfigError("solver.threads must be >= 1");
  if (cfg.scenario.kind == ScenarioKind::snapshot && cfg.scenario.snapshot.empty())
    throw ConfigError("scenario.snapshot is required for kind = snapshot");
}

inline RunConfig parse_run_config(std::istream& in) {
  std::stringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto cut = line.find_first_of("#;");
    cleaned << (cut == std::string::npos ? line : line.substr(0, cut)) << '\n';
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(cleaned, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  static const std::map<std::string, std::set<std::string>> known = {
      {"grid", {"lx", "ly", "nx", "ny", "depth", "gravity", "density", "surface_tension"}},
      {"scenario", {"kind", "epsilon", "mode_m", "mode_n", "phase", "amplitude", "width", "center_x",
                    "center_y", "remove_mean", "snapshot"}},
      {"time", {"dt", "t_end", "audit_cadence"}},
      {"solver", {"kinematic", "threads"}},
      {"audit", {"strict", "identity", "probes", "reference_amplitude"}},
      {"output", {"trajectory", "report", "probe_report", "snapshot"}},
  };
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
  }

  auto text = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(path)) return *v;
    return std::nullopt;
  };
  auto number = [&](const std::string& path, double fallback) {
    auto v = text(path);
    return v ? detail::parse_number(path, *v) : fallback;
  };
  auto integer = [&](const std::string& path, int fallback) {
    auto v = text(path);
    return v ? detail::parse_int(path, *v) : fallback;
  };
  auto flag = [&](const std::string& path, bool fallback) {
    auto v = text(path);
    return v ? detail::parse_bool(path, *v) : fallback;
  };

  RunConfig cfg;
  try {
    cfg.grid = make_grid(number("grid.lx", 2.0 * std::numbers::pi), number("grid.ly", 2.0 * std::numbers::pi),
                         integer("grid.nx", 32), integer("grid.ny", 32), number("grid.depth", 1.0),
                         number("grid.gravity", 9.81), number("grid.density", 1000.0),
                         number("grid.surface_tension", 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto& sc = cfg.scenario;
  const std::string kind = text("scenario.kind").value_or("rest");
  if (kind == "rest") sc.kind = ScenarioKind::rest;
  else if (kind == "linear_wave") sc.kind = ScenarioKind::linear_wave;
  else if (kind == "gaussian_packet") sc.kind = ScenarioKind::gaussian_packet;
  else if (kind == "snapshot") sc.kind = ScenarioKind::snapshot;
  else throw ConfigError("unknown scenario.kind '" + kind + "'");
  sc.epsilon = number("scenario.epsilon", sc.epsilon);
  sc.mode_m = integer("scenario.mode_m", sc.mode_m);
  sc.mode_n = integer("scenario.mode_n", sc.mode_n);
  const std::string phase = text("scenario.phase").value_or("standing");
  if (phase == "standing") sc.phase = WavePhase::standing;
  else if (phase == "traveling") sc.phase = WavePhase::traveling;
  else throw ConfigError("unknown scenario.phase '" + phase + "'");
  sc.amplitude = number("scenario.amplitude", sc.amplitude);
  sc.width = number("scenario.width", sc.width);
  if (auto v = text("scenario.center_x")) sc.center_x = detail::parse_number("scenario.center_x", *v);
  if (auto v = text("scenario.center_y")) sc.center_y = detail::parse_number("scenario.center_y", *v);
  sc.remove_mean = flag("scenario.remove_mean", sc.remove_mean);
  sc.snapshot = text("scenario.snapshot").value_or("");

  cfg.dt = number("time.dt", 0.0);
  cfg.t_end = number("time.t_end", 0.0);
  cfg.audit_cadence = integer("time.audit_cadence", 1);
  try {
    cfg.kinematic_solver = parse_kinematic_solver(text("solver.kinematic").value_or("nonlocal"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.threads = integer("solver.threads", 1);
  cfg.strict_suite = flag("audit.strict", true);
  cfg.identity_suite = flag("audit.identity", true);
  cfg.probe_suite = flag("audit.probes", false);
  cfg.reference_amplitude = number("audit.reference_amplitude", 0.0);
  cfg.trajectory_path = text("output.trajectory").value_or(cfg.trajectory_path);
  cfg.report_path = text("output.report").value_or(cfg.report_path);
  cfg.probe_report_path = text("output.probe_report").value_or("");
  cfg.snapshot_path = text("output.snapshot").value_or("");
  validate(cfg);
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_run_config(in);
}

inline RunConfig parse_run_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

inline const char* config_template() {
  return R"(# wavelaw run configuration
# Lines are `key = value` under [section] headers; '#' or ';' start a comment
# that runs to the end of the line.
# Numbers may end in a multiple of pi, e.g. `2pi` or `0.5*pi`.

[grid]
lx = 2pi                 # box length in x (m)
ly = 2pi                 # box length in y (m)
nx = 32                  # even, >= 4
ny = 32
depth = 1.0              # still-water depth h (m)
gravity = 9.81           # m/s^2
density = 1000.0         # kg/m^3
surface_tension = 0.0    # N/m, 0 disables capillarity

[scenario]
kind = linear_wave       # rest | linear_wave | gaussian_packet | snapshot
epsilon = 1e-3           # linear_wave amplitude (m)
mode_m = 1               # lattice indices of the wave vector
mode_n = 0
phase = standing         # standing | traveling
amplitude = 0.01         # gaussian_packet height (m)
width = 0.25             # gaussian_packet width s (m); the box must span 16 s
# center_x = 3.14        # packet centre, defaults to the box centre
# center_y = 3.14
remove_mean = true       # subtract the packet mean
# snapshot = state.wvlw  # initial state for kind = snapshot

[time]
dt = 0.01                # s
t_end = 2.0              # absolute end time (s)
audit_cadence = 1        # steps between audit samples

[solver]
kinematic = nonlocal     # nonlocal | dno
threads = 1

[audit]
strict = true            # zero right-hand-side laws, drift bound
identity = true          # bed-flux laws, residual-deviation bound
probes = false           # harmonic test-function residuals
reference_amplitude = 0  # amplitude used in the scale g a^2 Lx Ly; 0 = max |eta| at start

[output]
trajectory = trajectory.wvlw
report = report.csv
# probe_report = probes.csv
# snapshot = final.wvlw
)";
}

}  // namespace wavelaw
