#pragma once

#include "wavelaw/audit.hpp"

#include <fmt/format.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavelaw {

// Snapshot layout, all little-endian:
//   "WVLW" | u32 version | f64 lx ly nx ny depth gravity density surface_tension t
//   | f64 eta[nx*ny] | f64 q[nx*ny]      (node order j * ny + l)
inline constexpr std::array<char, 4> kSnapshotMagic{'W', 'V', 'L', 'W'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class U>
void put_le(std::ostream& out, U v) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <class U>
bool get_le(std::istream& in, U& v) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) return false;
  v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return true;
}

inline void put_f64(std::ostream& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }

inline double get_f64(std::istream& in) {
  std::uint64_t u = 0;
  if (!get_le(in, u)) throw FormatError("snapshot: truncated record");
  return std::bit_cast<double>(u);
}

}  // namespace detail

struct Snapshot {
  PeriodicGrid grid;
  SurfaceState state;
};

inline void write_snapshot(std::ostream& out, const PeriodicGrid& grid, const SurfaceState& state) {
  validate_state(grid, state);
  out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put_le(out, kSnapshotVersion);
  for (double v : {grid.lx, grid.ly, double(grid.nx), double(grid.ny), grid.depth, grid.gravity,
                   grid.density, grid.surface_tension, state.t})
    detail::put_f64(out, v);
  for (double v : state.eta) detail::put_f64(out, v);
  for (double v : state.q) detail::put_f64(out, v);
  if (!out) throw FormatError("snapshot: write failed");
}

/// Reads the next record; returns false at a clean end of stream.
inline bool read_snapshot(std::istream& in, Snapshot& snap) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() == 0 && in.eof()) return false;
  if (in.gcount() != 4 || magic != kSnapshotMagic) throw FormatError("snapshot: bad magic");
  std::uint32_t version = 0;
  if (!detail::get_le(in, version)) throw FormatError("snapshot: truncated header");
  if (version != kSnapshotVersion) throw FormatError("snapshot: unsupported version " + std::to_string(version));
  double h[9];
  for (double& v : h) v = detail::get_f64(in);
  if (h[2] != static_cast<int>(h[2]) || h[3] != static_cast<int>(h[3])) throw FormatError("snapshot: bad grid size");
  try {
    snap.grid = make_grid(h[0], h[1], static_cast<int>(h[2]), static_cast<int>(h[3]), h[4], h[5], h[6], h[7]);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  const int N = snap.grid.size();
  snap.state.t = h[8];
  snap.state.eta.resize(N);
  snap.state.q.resize(N);
  for (int i = 0; i < N; ++i) snap.state.eta[i] = detail::get_f64(in);
  for (int i = 0; i < N; ++i) snap.state.q[i] = detail::get_f64(in);
  return true;
}

inline void save_snapshot(const std::string& path, const PeriodicGrid& grid, const SurfaceState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_snapshot(out, grid, state);
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  Snapshot snap;
  if (!read_snapshot(in, snap)) throw FormatError("'" + path + "' holds no snapshot");
  return snap;
}

/// A trajectory file is a plain concatenation of snapshot records.
inline std::vector<Snapshot> load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<Snapshot> out;
  for (Snapshot s; read_snapshot(in, s);) out.push_back(s);
  return out;
}

/// Units of the area integral of each density.
inline constexpr std::array<const char*, kLawCount> kIntegralUnits{
    "m^4/s", "m^4/s", "m^5/s^2", "m^3", "m^4/s", "m^4", "m^4", "m^4", "m^5/s", "m^5/s", "m^5/s", "m^5/s"};
inline constexpr std::array<const char*, kLawCount> kRateUnits{
    "m^4/s^2", "m^4/s^2", "m^5/s^3", "m^3/s", "m^4/s^2", "m^4/s", "m^4/s", "m^4/s", "m^5/s^2", "m^5/s^2",
    "m^5/s^2", "m^5/s^2"};

inline void write_report_csv(std::ostream& out, const DensityReport& rep) {
  std::string header = "time[s]";
  for (int k = 0; k < kLawCount; ++k) header += fmt::format(",int_T{}[{}]", k + 1, kIntegralUnits[k]);
  for (int k = 0; k < kLawCount; ++k) header += fmt::format(",rhs_{}[{}]", k + 1, kRateUnits[k]);
  for (int k = 0; k < kLawCount; ++k) header += fmt::format(",residual_{}[{}]", k + 1, kRateUnits[k]);
  header += ",interior[-],surface_energy[m^5/s^2],cond_kinematic[-],cond_phi[-],cond_phi_t[-]\n";
  out << header;
  for (std::size_t i = 0; i < rep.samples(); ++i) {
    std::string row = fmt::format("{:.17g}", rep.times[i]);
    for (int k = 0; k < kLawCount; ++k) row += fmt::format(",{:.17g}", rep.density_integrals[k][i]);
    for (int k = 0; k < kLawCount; ++k) row += fmt::format(",{:.17g}", rep.rhs_values[k][i]);
    for (int k = 0; k < kLawCount; ++k) row += fmt::format(",{:.17g}", rep.residuals[k][i]);
    row += fmt::format(",{},{:.17g},{:.17g},{:.17g},{:.17g}\n", rep.interior(i) ? 1 : 0, rep.surface_energy[i],
                       rep.cond_kinematic[i], rep.cond_phi[i], rep.cond_phi_t[i]);
    out << row;
  }
}

inline void write_probe_csv(std::ostream& out, const std::vector<double>& times,
                            const std::vector<ProbeReport>& probes) {
  std::string header = "time[s]";
  for (const auto& p : probes) {
    const auto name = describe(p.spec);
    header += fmt::format(",{0} r1,{0} m1,{0} r2,{0} m2", name);
  }
  out << header << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::string row = fmt::format("{:.17g}", times[i]);
    for (const auto& p : probes)
      row += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g}", p.residual_1[i], p.magnitude_1[i], p.residual_2[i],
                         p.magnitude_2[i]);
    out << row << '\n';
  }
}

}  // namespace wavelaw
