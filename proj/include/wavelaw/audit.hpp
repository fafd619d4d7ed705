#pragma once

#include "wavelaw/dynamics.hpp"
#include "wavelaw/test_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wavelaw {

inline constexpr int kLawCount = 12;
using DensitySet = std::array<SurfaceField, kLawCount>;

/// Surface energy per unit density, (sigma/rho)(sqrt(1 + |grad eta|^2) - 1).
inline SurfaceField surface_energy_field(const PeriodicGrid& grid, const SurfaceField& eta) {
  const auto de = spectral_gradient(grid, eta);
  return grid.capillarity() * ((1.0 + de.x.square() + de.y.square()).sqrt() - 1.0);
}

/// The twelve densities at time t, laws numbered from 1 at index 0.
/// Horizontal weights use box-centred coordinates.
inline DensitySet density_fields(const PeriodicGrid& grid, const SurfaceState& state,
                                 const SurfaceField& eta_t, double t,
                                 bool include_surface_energy = true) {
  validate_state(grid, state);
  require_on_grid(grid, eta_t, "eta_t");
  const double g = grid.gravity;
  const SurfaceField& eta = state.eta;
  const SurfaceField& q = state.q;
  const auto de = spectral_gradient(grid, eta);
  const SurfaceField x = centered_x(grid);
  const SurfaceField y = centered_y(grid);

  DensitySet T;
  T[0] = -q * de.x;
  T[1] = -q * de.y;
  T[2] = 0.5 * q * eta_t + 0.5 * g * eta.square();
  if (include_surface_energy && grid.surface_tension > 0.0) T[2] += surface_energy_field(grid, eta);
  T[3] = eta;
  T[4] = q + g * t * eta;
  T[5] = x * eta + t * q * de.x;
  T[6] = y * eta + t * q * de.y;
  T[7] = 0.5 * eta.square() - t * T[4] + 0.5 * g * t * t * eta;
  T[8] = (x * de.y - y * de.x) * q;
  T[9] = (x + eta * de.x) * q + g * t * (x * eta + t * q * de.x) - 0.5 * g * t * t * q * de.x;
  T[10] = (y + eta * de.y) * q + g * t * (y * eta + t * q * de.y) - 0.5 * g * t * t * q * de.y;
  T[11] = (eta - x * de.x - y * de.y) * q + t * (9.0 * g * T[7] - 5.0 * T[2]) +
          4.5 * g * t * t * T[4] - 1.5 * g * g * t * t * t * T[3];
  return T;
}

/// Bed flux right-hand sides of all twelve laws. `phi_t` may be null when
/// only laws that do not need it are read.
inline std::array<double, kLawCount> flux_rhs_all(const PeriodicGrid& grid,
                                                  const ModalPotential& phi,
                                                  const ModalPotential* phi_t, double t) {
  const double g = grid.gravity, h = grid.depth;
  const auto bed = bottom_trace(grid, phi);
  const SurfaceField kinetic = 0.5 * (bed.phi_x.square() + bed.phi_y.square());
  const SurfaceField x = centered_x(grid);
  const SurfaceField y = centered_y(grid);
  auto integral = [&](const SurfaceField& f) { return integrate_surface(grid, f); };

  std::array<double, kLawCount> rhs{};
  rhs[4] = -g * h * grid.area();
  rhs[7] = integral(t * kinetic - bed.phi);
  rhs[9] = -integral(kinetic * x);
  rhs[10] = -integral(kinetic * y);
  if (phi_t) {
    const auto bed_t = bottom_trace(grid, *phi_t);
    rhs[8] = integral(x * bed_t.phi_y - y * bed_t.phi_x);
    const SurfaceField pressure = -bed_t.phi - kinetic + g * h;  // p / rho at z = -h
    rhs[11] = integral(2.0 * g * h * h - pressure * h - bed_t.phi * h - 9.0 * g * t * bed.phi);
  } else {
    rhs[8] = rhs[11] = NAN;
  }
  return rhs;
}

/// Right-hand side of law `law` (1-based).
inline double flux_rhs(const PeriodicGrid& grid, int law, const SurfaceState& state,
                       const SurfaceField& eta_t, const ModalPotential* phi,
                       const ModalPotential* phi_t, double t) {
  if (law < 1 || law > kLawCount) throw std::out_of_range("law index must be in 1..12");
  validate_state(grid, state);
  require_on_grid(grid, eta_t, "eta_t");
  switch (law) {
    case 1: case 2: case 3: case 4: case 6: case 7:
      return 0.0;
    case 5:
      return -grid.gravity * grid.depth * grid.area();
    default:
      break;
  }
  if (!phi) throw std::invalid_argument("flux_rhs: law needs the fitted potential");
  if ((law == 9 || law == 12) && !phi_t)
    throw std::invalid_argument("flux_rhs: law needs the fitted potential rate");
  return flux_rhs_all(grid, *phi, phi_t, t)[law - 1];
}

struct ResidualTerms {
  double value = 0.0;
  double magnitude = 0.0;  // sum over terms of the integral of |integrand|
};

namespace detail {

inline std::vector<HarmonicValue> probe_on_surface(const PeriodicGrid& grid, const SurfaceField& eta,
                                                   const TestFunctionSpec& psi) {
  return sample_centered(grid, [&](double x, double y, int i) { return evaluate(psi, x, y, eta[i]); });
}

inline std::vector<HarmonicValue> probe_on_bed(const PeriodicGrid& grid, const TestFunctionSpec& psi) {
  const double z = -grid.depth;
  return sample_centered(grid, [&](double x, double y, int) { return evaluate(psi, x, y, z); });
}

template <class F>
std::pair<double, double> integral_and_magnitude(const PeriodicGrid& grid, F&& integrand) {
  SurfaceField v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = integrand(i);
  return {integrate_surface(grid, v), integrate_surface(grid, v.abs())};
}

}  // namespace detail

/// Surface series s(t) = integral of psi_z(x, y, eta) eta_t, the time
/// derivative of the integral of psi on the surface.
inline double probe_surface_rate(const PeriodicGrid& grid, const SurfaceState& state,
                                 const SurfaceField& eta_t, const TestFunctionSpec& psi) {
  validate(psi);
  const auto top = detail::probe_on_surface(grid, state.eta, psi);
  return detail::integral_and_magnitude(grid, [&](int i) { return take(psi.part, top[i].psi_z) * eta_t[i]; }).first;
}

inline ResidualTerms nonlocal_residual_1_terms(const PeriodicGrid& grid, const SurfaceState& state,
                                               const SurfaceField& eta_t, const ModalPotential& phi,
                                               const TestFunctionSpec& psi) {
  validate(psi);
  validate_state(grid, state);
  const auto top = detail::probe_on_surface(grid, state.eta, psi);
  const auto bot = detail::probe_on_bed(grid, psi);
  const auto dq = spectral_gradient(grid, state.q);
  const auto bed = bottom_trace(grid, phi);
  const auto P = psi.part;
  const auto [a, ma] = detail::integral_and_magnitude(grid, [&](int i) { return take(P, top[i].psi_z) * eta_t[i]; });
  const auto [b, mb] = detail::integral_and_magnitude(
      grid, [&](int i) { return take(P, dq.x[i] * top[i].psi_x + dq.y[i] * top[i].psi_y); });
  const auto [c, mc] = detail::integral_and_magnitude(grid, [&](int i) { return take(P, bed.phi[i] * bot[i].psi_zz); });
  return {a - b + c, ma + mb + mc};
}

inline double nonlocal_residual_1(const PeriodicGrid& grid, const SurfaceState& state,
                                  const SurfaceField& eta_t, const ModalPotential& phi,
                                  const TestFunctionSpec& psi) {
  return nonlocal_residual_1_terms(grid, state, eta_t, phi, psi).value;
}

/// Second identity. `surface_rate_derivative` is d/dt of probe_surface_rate,
/// taken from the sampled series. `surface_rate_magnitude` is the integral of
/// |d/dt (psi_z eta_t)| for that term; the surface term alone is assumed when
/// it is not given.
inline ResidualTerms nonlocal_residual_2_terms(const PeriodicGrid& grid, const SurfaceState& state,
                                               const SurfaceField& q_t, const ModalPotential& phi,
                                               const ModalPotential& phi_t, const TestFunctionSpec& psi,
                                               double surface_rate_derivative,
                                               std::optional<double> surface_rate_magnitude = {}) {
  validate(psi);
  validate_state(grid, state);
  require_on_grid(grid, q_t, "q_t");
  const auto top = detail::probe_on_surface(grid, state.eta, psi);
  const auto bot = detail::probe_on_bed(grid, psi);
  const auto dq = spectral_gradient(grid, state.q);
  const auto de = spectral_gradient(grid, state.eta);
  const auto flow = evaluate_on_surface(grid, state.eta, phi);
  const auto bed_t = bottom_trace(grid, phi_t);
  const auto P = psi.part;
  const auto [b, mb] = detail::integral_and_magnitude(grid, [&](int i) {
    const auto& v = top[i];
    const auto normal_dpsi = v.psi_zz - v.psi_zx * de.x[i] - v.psi_zy * de.y[i];
    const double normal_flow = flow.phi_z[i] - flow.phi_x[i] * de.x[i] - flow.phi_y[i] * de.y[i];
    return take(P, q_t[i] * normal_dpsi + (dq.x[i] * v.psi_zx + dq.y[i] * v.psi_zy) * normal_flow);
  });
  const auto [c, mc] = detail::integral_and_magnitude(grid, [&](int i) { return take(P, bed_t.phi[i] * bot[i].psi_zz); });
  return {surface_rate_derivative - b + c,
          surface_rate_magnitude.value_or(std::abs(surface_rate_derivative)) + mb + mc};
}

inline double nonlocal_residual_2(const PeriodicGrid& grid, const SurfaceState& state,
                                  const SurfaceField& q_t, const ModalPotential& phi,
                                  const ModalPotential& phi_t, const TestFunctionSpec& psi,
                                  double surface_rate_derivative) {
  return nonlocal_residual_2_terms(grid, state, q_t, phi, phi_t, psi, surface_rate_derivative).value;
}

/// Everything the audit needs at one instant.
struct AuditSample {
  SurfaceState state;
  SurfaceField eta_t;
  SurfaceField q_t;
  ModalPotential phi;
  ModalPotential phi_t;
  double cond_kinematic = 1.0;
};

inline AuditSample make_audit_sample(const PeriodicGrid& grid, const SurfaceState& state,
                                     const RatePair& r, const SolveDiagnostics& kinematic) {
  AuditSample s;
  s.state = state;
  s.eta_t = r.eta_t;
  s.q_t = r.q_t;
  s.phi = fit_modal_potential(grid, state.eta, state.q);
  s.phi_t = fit_potential_rate(grid, state.eta, r.eta_t, r.q_t, s.phi);
  s.cond_kinematic = kinematic.condition;
  return s;
}

inline AuditSample make_audit_sample(const PeriodicGrid& grid, const SurfaceState& state,
                                     KinematicSolver solver) {
  SolveDiagnostics kin;
  const auto r = rates(grid, state, solver, &kin);
  return make_audit_sample(grid, state, r, kin);
}

/// Fourth-order finite-difference derivative of a uniformly sampled series;
/// the two samples at each end use one-sided stencils.
inline std::vector<double> fd4_derivative(const std::vector<double>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 5) throw std::invalid_argument("fd4_derivative: need at least 5 samples");
  std::vector<double> d(n);
  const double s = 1.0 / (12.0 * dt);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * s;
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * s;
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) * s;
  d[n - 2] = (-f[n - 5] + 6 * f[n - 4] - 18 * f[n - 3] + 10 * f[n - 2] + 3 * f[n - 1]) * s;
  d[n - 1] = (3 * f[n - 5] - 16 * f[n - 4] + 36 * f[n - 3] - 48 * f[n - 2] + 25 * f[n - 1]) * s;
  return d;
}

struct DriftMetrics {
  double max_abs_residual = 0.0;        // interior samples
  double mean_residual = 0.0;           // interior samples
  double max_residual_deviation = 0.0;  // max |residual - mean|, interior samples
  double max_integral_drift = 0.0;      // max |I(t) - I(t0)|, all samples
  double max_abs_integral = 0.0;
};

struct DensityReport {
  std::vector<double> times;
  std::array<std::vector<double>, kLawCount> density_integrals;
  std::array<std::vector<double>, kLawCount> integral_rates;
  std::array<std::vector<double>, kLawCount> rhs_values;
  std::array<std::vector<double>, kLawCount> residuals;
  std::vector<double> surface_energy;
  std::vector<double> cond_kinematic, cond_phi, cond_phi_t;
  std::array<DriftMetrics, kLawCount> drift_metrics;

  std::size_t samples() const { return times.size(); }
  /// Interior samples are those with a centred stencil.
  bool interior(std::size_t i) const { return i >= 2 && i + 2 < times.size(); }
};

inline DriftMetrics drift_of(const std::vector<double>& integral, const std::vector<double>& residual) {
  DriftMetrics m;
  const std::size_t n = integral.size();
  for (std::size_t i = 0; i < n; ++i) {
    m.max_integral_drift = std::max(m.max_integral_drift, std::abs(integral[i] - integral[0]));
    m.max_abs_integral = std::max(m.max_abs_integral, std::abs(integral[i]));
  }
  // Mean taken as an offset from the first interior sample so a constant
  // series has exactly zero deviation.
  const double base = residual[2];
  double sum = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) sum += residual[i] - base;
  m.mean_residual = base + sum / static_cast<double>(n - 4);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    m.max_abs_residual = std::max(m.max_abs_residual, std::abs(residual[i]));
    m.max_residual_deviation = std::max(m.max_residual_deviation, std::abs(residual[i] - m.mean_residual));
  }
  return m;
}

inline DensityReport audit_trajectory(const PeriodicGrid& grid, const std::vector<AuditSample>& samples,
                                      double sample_dt) {
  if (samples.size() < 5) throw std::invalid_argument("audit_trajectory: need at least 5 samples");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("audit_trajectory: sample spacing must be positive");
  DensityReport rep;
  for (const auto& s : samples) {
    const double t = s.state.t;
    rep.times.push_back(t);
    const auto T = density_fields(grid, s.state, s.eta_t, t);
    const auto rhs = flux_rhs_all(grid, s.phi, &s.phi_t, t);
    for (int k = 0; k < kLawCount; ++k) {
      rep.density_integrals[k].push_back(integrate_surface(grid, T[k]));
      rep.rhs_values[k].push_back(rhs[k]);
    }
    rep.surface_energy.push_back(integrate_surface(grid, surface_energy_field(grid, s.state.eta)));
    rep.cond_kinematic.push_back(s.cond_kinematic);
    rep.cond_phi.push_back(s.phi.diagnostics.condition);
    rep.cond_phi_t.push_back(s.phi_t.diagnostics.condition);
  }
  for (int k = 0; k < kLawCount; ++k) {
    rep.integral_rates[k] = fd4_derivative(rep.density_integrals[k], sample_dt);
    rep.residuals[k].resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      rep.residuals[k][i] = rep.integral_rates[k][i] - rep.rhs_values[k][i];
    rep.drift_metrics[k] = drift_of(rep.density_integrals[k], rep.residuals[k]);
  }
  return rep;
}

/// Residual series of both integral identities for one probe.
struct ProbeReport {
  TestFunctionSpec spec;
  std::vector<double> residual_1, magnitude_1;
  std::vector<double> residual_2, magnitude_2;
  double worst_ratio_1 = 0.0;  // max over interior samples of |r| / magnitude
  double worst_ratio_2 = 0.0;
};

inline double residual_ratio(double value, double magnitude) {
  if (value == 0.0) return 0.0;
  return magnitude > 0.0 ? std::abs(value) / magnitude : INFINITY;
}

inline ProbeReport audit_probe(const PeriodicGrid& grid, const std::vector<AuditSample>& samples,
                               double sample_dt, const TestFunctionSpec& psi) {
  ProbeReport rep;
  rep.spec = psi;
  // Pointwise psi_z eta_t per sample, differentiated node by node with the
  // same stencil, gives the magnitude of the time-derivative term.
  validate(psi);
  const std::size_t ns = samples.size();
  std::vector<std::vector<double>> pointwise(grid.size(), std::vector<double>(ns));
  std::vector<double> series;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& s = samples[i];
    const auto top = detail::probe_on_surface(grid, s.state.eta, psi);
    SurfaceField f(grid.size());
    for (int n = 0; n < grid.size(); ++n) pointwise[n][i] = f[n] = take(psi.part, top[n].psi_z) * s.eta_t[n];
    series.push_back(integrate_surface(grid, f));
  }
  const auto rate = fd4_derivative(series, sample_dt);
  std::vector<SurfaceField> node_rate(ns, SurfaceField(grid.size()));
  for (int n = 0; n < grid.size(); ++n) {
    const auto d = fd4_derivative(pointwise[n], sample_dt);
    for (std::size_t i = 0; i < ns; ++i) node_rate[i][n] = std::abs(d[i]);
  }
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& s = samples[i];
    const auto r1 = nonlocal_residual_1_terms(grid, s.state, s.eta_t, s.phi, psi);
    const auto r2 =
        nonlocal_residual_2_terms(grid, s.state, s.q_t, s.phi, s.phi_t, psi, rate[i],
                                  integrate_surface(grid, node_rate[i]));
    rep.residual_1.push_back(r1.value);
    rep.magnitude_1.push_back(r1.magnitude);
    rep.residual_2.push_back(r2.value);
    rep.magnitude_2.push_back(r2.magnitude);
    rep.worst_ratio_1 = std::max(rep.worst_ratio_1, residual_ratio(r1.value, r1.magnitude));
    if (i >= 2 && i + 2 < samples.size())
      rep.worst_ratio_2 = std::max(rep.worst_ratio_2, residual_ratio(r2.value, r2.magnitude));
  }
  return rep;
}

/// Probes used by the residual suite.
inline std::vector<TestFunctionSpec> standard_probes() {
  std::vector<TestFunctionSpec> out;
  const std::pair<HarmonicFamily, int> base[] = {{HarmonicFamily::x, 1},  {HarmonicFamily::x, 2},
                                                 {HarmonicFamily::y, 2},  {HarmonicFamily::xy, 2},
                                                 {HarmonicFamily::x, 3},  {HarmonicFamily::x_plus_y, 3}};
  for (const auto& [family, n] : base)
    for (auto part : {ComplexPart::real, ComplexPart::imag}) out.push_back({family, n, part});
  return out;
}

/// Laws whose right-hand side is zero and the identity laws with bed fluxes.
inline constexpr std::array<int, 6> kStrictLaws{1, 2, 3, 4, 6, 7};
inline constexpr std::array<int, 6> kIdentityLaws{5, 8, 9, 10, 11, 12};
inline constexpr double kStrictTolerance = 1e-6;
inline constexpr double kIdentityTolerance = 1e-5;
inline constexpr double kProbeTolerance = 1e-6;

/// max(max_t |I_law(t)|, g eps^2 Lx Ly).
inline double law_scale(const PeriodicGrid& grid, const DensityReport& rep, int law, double amplitude) {
  return std::max(rep.drift_metrics[law - 1].max_abs_integral,
                  grid.gravity * amplitude * amplitude * grid.area());
}

struct SuiteLine {
  int law = 0;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline std::vector<SuiteLine> strict_suite(const PeriodicGrid& grid, const DensityReport& rep, double amplitude) {
  std::vector<SuiteLine> out;
  for (int law : kStrictLaws) {
    const double v = rep.drift_metrics[law - 1].max_integral_drift;
    const double bound = kStrictTolerance * law_scale(grid, rep, law, amplitude);
    out.push_back({law, v, bound, v < bound || v == 0.0});
  }
  return out;
}

inline std::vector<SuiteLine> identity_suite(const PeriodicGrid& grid, const DensityReport& rep, double amplitude) {
  std::vector<SuiteLine> out;
  for (int law : kIdentityLaws) {
    const double v = rep.drift_metrics[law - 1].max_residual_deviation;
    const double bound = kIdentityTolerance * law_scale(grid, rep, law, amplitude);
    out.push_back({law, v, bound, v < bound || v == 0.0});
  }
  return out;
}

}  // namespace wavelaw
