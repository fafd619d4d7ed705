#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavelaw {

/// Real samples on the grid nodes, row-major with the x index outer:
/// node (j, l) lives at offset j * ny + l.
using SurfaceField = Eigen::ArrayXd;

/// Doubly periodic horizontal box plus the fluid constants.
struct PeriodicGrid {
  double lx = 0.0;
  double ly = 0.0;
  int nx = 0;
  int ny = 0;
  double depth = 0.0;
  double gravity = 0.0;
  double density = 0.0;
  double surface_tension = 0.0;

  int size() const { return nx * ny; }
  int index(int j, int l) const { return j * ny + l; }
  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  double area() const { return lx * ly; }
  double cell_area() const { return dx() * dy(); }
  double x(int j) const { return j * dx(); }
  double y(int l) const { return l * dy(); }

  /// Signed lattice index for FFT slot p: maps [0, n) onto [-n/2, n/2).
  static int signed_mode(int p, int n) { return p < n / 2 ? p : p - n; }
  double kx(int m) const { return 2.0 * std::numbers::pi * m / lx; }
  double ky(int n) const { return 2.0 * std::numbers::pi * n / ly; }

  /// sigma / rho, the kinematic surface tension.
  double capillarity() const { return surface_tension / density; }
};

inline PeriodicGrid make_grid(double lx, double ly, int nx, int ny, double depth,
                              double gravity, double density, double surface_tension) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0)
    throw std::invalid_argument("grid: Nx and Ny must be even and >= 4");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("grid: box lengths must be positive");
  if (!(depth > 0.0))
    throw std::invalid_argument("grid: depth must be positive");
  if (!(gravity > 0.0) || !(density > 0.0))
    throw std::invalid_argument("grid: gravity and density must be positive");
  if (!(surface_tension >= 0.0))
    throw std::invalid_argument("grid: surface tension must be non-negative");
  return PeriodicGrid{lx, ly, nx, ny, depth, gravity, density, surface_tension};
}

struct SurfaceState {
  double t = 0.0;
  SurfaceField eta;
  SurfaceField q;
};

inline void require_on_grid(const PeriodicGrid& grid, const SurfaceField& f, const char* what) {
  if (f.size() != grid.size())
    throw std::invalid_argument(std::string(what) + ": field size does not match grid");
  if (!f.allFinite())
    throw std::invalid_argument(std::string(what) + ": field has non-finite values");
}

inline void validate_state(const PeriodicGrid& grid, const SurfaceState& s) {
  require_on_grid(grid, s.eta, "eta");
  require_on_grid(grid, s.q, "q");
  if (!std::isfinite(s.t)) throw std::invalid_argument("state: non-finite time");
  if (s.eta.minCoeff() <= -grid.depth)
    throw std::invalid_argument("state: surface touches the bed");
}

/// Samples f(x, y) at every node.
template <class F>
SurfaceField sample(const PeriodicGrid& grid, F&& f) {
  SurfaceField out(grid.size());
  for (int j = 0; j < grid.nx; ++j)
    for (int l = 0; l < grid.ny; ++l) out[grid.index(j, l)] = f(grid.x(j), grid.y(l));
  return out;
}

/// Samples f at box-centred coordinates. The centred coordinate jumps from
/// +L/2 to -L/2 across the j = 0 (or l = 0) node line; there the value is the
/// average of both one-sided limits, which is what the trigonometric
/// interpolant of the sawtooth takes at a jump.
/// f is called as f(x, y, node_offset); the result type may be complex.
template <class F>
auto sample_centered(const PeriodicGrid& grid, F&& f) {
  using Value = decltype(f(0.0, 0.0, 0));
  const double hx = 0.5 * grid.lx;
  const double hy = 0.5 * grid.ly;
  std::vector<Value> out(grid.size());
  for (int j = 0; j < grid.nx; ++j) {
    for (int l = 0; l < grid.ny; ++l) {
      const int i = grid.index(j, l);
      const double x = grid.x(j) - hx;
      const double y = grid.y(l) - hy;
      if (j == 0 && l == 0)
        out[i] = 0.25 * (f(-hx, -hy, i) + f(hx, -hy, i) + f(-hx, hy, i) + f(hx, hy, i));
      else if (j == 0)
        out[i] = 0.5 * (f(-hx, y, i) + f(hx, y, i));
      else if (l == 0)
        out[i] = 0.5 * (f(x, -hy, i) + f(x, hy, i));
      else
        out[i] = f(x, y, i);
    }
  }
  return out;
}

/// Box-centred coordinates, zero on the wrap-around node lines.
inline SurfaceField centered_x(const PeriodicGrid& grid) {
  const auto v = sample_centered(grid, [](double x, double, int) { return x; });
  return Eigen::Map<const SurfaceField>(v.data(), grid.size());
}

inline SurfaceField centered_y(const PeriodicGrid& grid) {
  const auto v = sample_centered(grid, [](double, double y, int) { return y; });
  return Eigen::Map<const SurfaceField>(v.data(), grid.size());
}

}  // namespace wavelaw
