#pragma once

#include "wavelaw/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace wavelaw {

inline SurfaceState scenario_rest(const PeriodicGrid& grid) {
  return {0.0, SurfaceField::Zero(grid.size()), SurfaceField::Zero(grid.size())};
}

enum class WavePhase { standing, traveling };

/// Capillary-gravity frequency of a small-amplitude mode.
inline double linear_frequency(const PeriodicGrid& grid, double k) {
  return std::sqrt((grid.gravity + grid.capillarity() * k * k) * k * std::tanh(k * grid.depth));
}

inline SurfaceState scenario_linear_wave(const PeriodicGrid& grid, double eps, int m, int n,
                                         WavePhase phase) {
  if (m < -grid.nx / 2 || m >= grid.nx / 2 || n < -grid.ny / 2 || n >= grid.ny / 2)
    throw std::invalid_argument("linear wave: mode is off the lattice");
  if (m == 0 && n == 0) throw std::invalid_argument("linear wave: mode must be nonzero");
  const double kx = grid.kx(m), ky = grid.ky(n);
  const double k = std::hypot(kx, ky);
  if (std::abs(eps) * k > kMaxSlope) throw std::invalid_argument("linear wave: steepness exceeds the guard");
  SurfaceState s = scenario_rest(grid);
  s.eta = sample(grid, [&](double x, double y) { return eps * std::cos(kx * x + ky * y); });
  if (phase == WavePhase::traveling) {
    const double amp = eps * linear_frequency(grid, k) / (k * std::tanh(k * grid.depth));
    s.q = sample(grid, [&](double x, double y) { return amp * std::sin(kx * x + ky * y); });
  }
  return s;
}

/// Gaussian hump at `center` (box coordinates, default the box centre) with
/// distances taken to the nearest periodic image. The box must span 16 widths.
inline SurfaceState scenario_gaussian_packet(const PeriodicGrid& grid, double amplitude, double width,
                                             double center_x, double center_y, bool remove_mean = true) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian packet: width must be positive");
  if (grid.lx < 16.0 * width || grid.ly < 16.0 * width)
    throw std::invalid_argument("gaussian packet: box must be at least 16 widths across");
  auto nearest = [](double d, double L) { return d - L * std::round(d / L); };
  SurfaceState s = scenario_rest(grid);
  s.eta = sample(grid, [&](double x, double y) {
    const double dx = nearest(x - center_x, grid.lx);
    const double dy = nearest(y - center_y, grid.ly);
    return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
  });
  if (remove_mean) s.eta -= s.eta.mean();
  if (max_slope(grid, s.eta) > kMaxSlope) throw std::invalid_argument("gaussian packet: steepness exceeds the guard");
  if (s.eta.minCoeff() <= -kMinDepthFraction * grid.depth)
    throw std::invalid_argument("gaussian packet: trough reaches the depth guard");
  return s;
}

inline SurfaceState scenario_gaussian_packet(const PeriodicGrid& grid, double amplitude, double width) {
  return scenario_gaussian_packet(grid, amplitude, width, 0.5 * grid.lx, 0.5 * grid.ly);
}

}  // namespace wavelaw
