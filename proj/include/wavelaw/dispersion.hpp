#pragma once

#include "wavelaw/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wavelaw {

struct PeriodMeasurement {
  double predicted = 0.0;  // 2 pi / omega from the linear relation
  double measured = 0.0;
  double relative_error() const { return std::abs(measured - predicted) / predicted; }
};

/// Amplitude of cos(k.x) in eta, 2/N sum eta cos(k.x_j).
inline double cosine_amplitude(const PeriodicGrid& grid, const SurfaceField& eta, int m, int n) {
  const SurfaceField c = sample(grid, [&](double x, double y) { return std::cos(grid.kx(m) * x + grid.ky(n) * y); });
  return 2.0 * (eta * c).sum() / grid.size();
}

namespace detail {

// Root of the cubic through four equally spaced samples bracketing a sign
// change between the middle two.
inline double cubic_root(const double* t, const double* a) {
  auto value = [&](double x) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      double w = a[i];
      for (int j = 0; j < 4; ++j)
        if (j != i) w *= (x - t[j]) / (t[i] - t[j]);
      s += w;
    }
    return s;
  };
  double lo = t[1], hi = t[2];
  double flo = value(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = value(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Runs a standing wave of amplitude eps in mode (m, n) for one predicted
/// period with `steps` RK4 steps and measures the period from the two zero
/// crossings of the modal amplitude, T = 2 (t_up - t_down).
inline PeriodMeasurement measure_standing_period(const PeriodicGrid& grid, double eps, int m, int n,
                                                 int steps, KinematicSolver solver) {
  if (steps < 8) throw std::invalid_argument("measure_standing_period: need at least 8 steps");
  const double k = std::hypot(grid.kx(m), grid.ky(n));
  PeriodMeasurement out;
  out.predicted = 2.0 * std::numbers::pi / linear_frequency(grid, k);
  const double dt = out.predicted / steps;

  SurfaceState s = scenario_linear_wave(grid, eps, m, n, WavePhase::standing);
  std::vector<double> times{0.0}, amp{cosine_amplitude(grid, s.eta, m, n)};
  for (int i = 1; i <= steps; ++i) {
    s = step_rk4(grid, s, dt, solver);
    s.t = i * dt;
    times.push_back(s.t);
    amp.push_back(cosine_amplitude(grid, s.eta, m, n));
  }

  std::optional<double> down, up;
  for (std::size_t i = 1; i + 2 < amp.size(); ++i) {
    if (amp[i] == 0.0 || (amp[i] > 0) == (amp[i + 1] > 0)) continue;
    const double root = detail::cubic_root(&times[i - 1], &amp[i - 1]);
    if (amp[i] > 0 && !down) down = root;
    else if (amp[i] < 0 && down && !up) up = root;
  }
  if (!down || !up) throw std::runtime_error("measure_standing_period: zero crossings not found");
  out.measured = 2.0 * (*up - *down);
  return out;
}

}  // namespace wavelaw
