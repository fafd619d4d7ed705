#pragma once

#include "wavelaw/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavelaw {

/// Largest |k|(max eta + h) accepted before normalisation.
inline constexpr double kExponentCap = 700.0;
/// Fits with a larger condition estimate are rejected.
inline constexpr double kMaxCondition = 1e12;

struct SolveDiagnostics {
  double residual = 0.0;   // max nodal |A x - b|
  double condition = 1.0;  // 1-norm estimate from the LU factors
};

class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double condition)
      : std::runtime_error(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// phi(x, y, z) = sum_k coeffs_k cosh(|k|(z + h)) / scale_k exp(i k.x).
/// Coefficients are stored per lattice slot in FFT order and are Hermitian
/// on the grid: slots whose phases are conjugate at the nodes carry
/// conjugate coefficients.
struct ModalPotential {
  int nx = 0;
  int ny = 0;
  double depth = 0.0;
  double reference_height = 0.0;  // h + max(eta) used for scale
  Spectrum coeffs;
  std::vector<double> scale;
  SolveDiagnostics diagnostics;
};

namespace detail {

inline int wrap(int a, int n) { return ((a % n) + n) % n; }

// Per-slot wavenumbers; derivative wavenumbers drop the Nyquist direction.
struct LatticeMode {
  int m = 0, n = 0;
  double kx = 0.0, ky = 0.0;    // derivative wavenumbers
  double kabs = 0.0;            // full |k|
  int shell = 0;                // index of the distinct (|m|, |n|) pair
};

struct Lattice {
  std::vector<LatticeMode> modes;
  std::vector<double> shell_k;  // |k| per shell
  std::vector<std::complex<double>> ex, ey;
  double kmax = 0.0;
};

inline Lattice make_lattice(const PeriodicGrid& grid) {
  Lattice lat;
  lat.modes.resize(grid.size());
  std::map<std::pair<int, int>, int> shells;
  for (int p = 0; p < grid.nx; ++p) {
    const int m = PeriodicGrid::signed_mode(p, grid.nx);
    for (int r = 0; r < grid.ny; ++r) {
      const int n = PeriodicGrid::signed_mode(r, grid.ny);
      LatticeMode& mode = lat.modes[grid.index(p, r)];
      mode.m = m;
      mode.n = n;
      mode.kx = 2 * m == -grid.nx ? 0.0 : grid.kx(m);
      mode.ky = 2 * n == -grid.ny ? 0.0 : grid.ky(n);
      mode.kabs = std::hypot(grid.kx(m), grid.ky(n));
      auto [it, inserted] = shells.try_emplace({std::abs(m), std::abs(n)}, static_cast<int>(lat.shell_k.size()));
      if (inserted) lat.shell_k.push_back(mode.kabs);
      mode.shell = it->second;
      lat.kmax = std::max(lat.kmax, mode.kabs);
    }
  }
  const double two_pi = 2.0 * std::numbers::pi;
  lat.ex.resize(grid.nx);
  lat.ey.resize(grid.ny);
  for (int p = 0; p < grid.nx; ++p) lat.ex[p] = std::polar(1.0, two_pi * p / grid.nx);
  for (int r = 0; r < grid.ny; ++r) lat.ey[r] = std::polar(1.0, two_pi * r / grid.ny);
  return lat;
}

// exp(i k.x_j) at every node, in node order.
inline void mode_phases(const Lattice& lat, const PeriodicGrid& grid, const LatticeMode& mode,
                        std::vector<std::complex<double>>& out) {
  out.resize(grid.size());
  std::vector<std::complex<double>> row(grid.ny);
  for (int l = 0; l < grid.ny; ++l) row[l] = lat.ey[wrap(mode.n * l, grid.ny)];
  for (int j = 0; j < grid.nx; ++j) {
    const auto cx = lat.ex[wrap(mode.m * j, grid.nx)];
    for (int l = 0; l < grid.ny; ++l) out[grid.index(j, l)] = cx * row[l];
  }
}

// cosh(k(eta + h)) / cosh(k H) and sinh(k(eta + h)) / cosh(k H) for every
// shell and node, evaluated without forming the large exponentials.
struct VerticalProfiles {
  Eigen::ArrayXXd c;  // nodes x shells
  Eigen::ArrayXXd s;
};

inline VerticalProfiles vertical_profiles(const Lattice& lat, const SurfaceField& eta,
                                          double depth, double reference_height) {
  const int shells = static_cast<int>(lat.shell_k.size());
  VerticalProfiles vp{Eigen::ArrayXXd(eta.size(), shells), Eigen::ArrayXXd(eta.size(), shells)};
  for (int u = 0; u < shells; ++u) {
    const double k = lat.shell_k[u];
    const double denom = 1.0 + std::exp(-2.0 * k * reference_height);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double a = k * (eta[i] + depth);
      const double lead = std::exp(a - k * reference_height) / denom;
      const double tail = std::exp(-2.0 * a);
      vp.c(i, u) = lead * (1.0 + tail);
      vp.s(i, u) = lead * (1.0 - tail);
    }
  }
  return vp;
}

inline void check_exponent(const Lattice& lat, double height) {
  if (lat.kmax * height > kExponentCap)
    throw std::domain_error("potential: |k|(max eta + h) = " + std::to_string(lat.kmax * height) +
                            " exceeds the exponent cap");
}

// Pairs lattice slots whose phases are conjugate at the nodes. Each entry is
// (slot, partner); partner == slot for self-conjugate slots.
inline std::vector<std::pair<int, int>> conjugate_classes(const PeriodicGrid& grid) {
  std::vector<std::pair<int, int>> classes;
  for (int p = 0; p < grid.nx; ++p) {
    for (int r = 0; r < grid.ny; ++r) {
      const int slot = grid.index(p, r);
      const int partner = grid.index((grid.nx - p) % grid.nx, (grid.ny - r) % grid.ny);
      if (partner >= slot) classes.emplace_back(slot, partner);
    }
  }
  return classes;
}

// Reused storage for the dense N x N systems; avoids a fresh 8 MB
// allocation per solve at 32 x 32.
struct DenseWorkspace {
  Eigen::MatrixXd matrix;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

inline DenseWorkspace& dense_workspace(int n) {
  thread_local DenseWorkspace ws;
  if (ws.matrix.rows() != n) ws.matrix.resize(n, n);
  return ws;
}

}  // namespace detail

/// Collocation fit of a bed-satisfying harmonic potential to Dirichlet data
/// on z = eta. Dense LU with partial pivoting on the real form of the system.
inline ModalPotential fit_modal_potential(const PeriodicGrid& grid, const SurfaceField& eta,
                                          const SurfaceField& dirichlet) {
  require_on_grid(grid, eta, "fit eta");
  require_on_grid(grid, dirichlet, "fit data");
  if (eta.minCoeff() <= -grid.depth)
    throw std::invalid_argument("fit_modal_potential: surface touches the bed");

  const auto lat = detail::make_lattice(grid);
  const double height = grid.depth + eta.maxCoeff();
  detail::check_exponent(lat, height);
  const auto vp = detail::vertical_profiles(lat, eta, grid.depth, height);
  const auto classes = detail::conjugate_classes(grid);

  const int N = grid.size();
  auto& ws = detail::dense_workspace(N);
  auto& A = ws.matrix;
  std::vector<std::complex<double>> e;
  int col = 0;
  for (const auto& [slot, partner] : classes) {
    const auto& mode = lat.modes[slot];
    detail::mode_phases(lat, grid, mode, e);
    for (int i = 0; i < N; ++i) A(i, col) = vp.c(i, mode.shell) * e[i].real();
    if (partner != slot)
      for (int i = 0; i < N; ++i) A(i, col + 1) = vp.c(i, mode.shell) * e[i].imag();
    col += partner != slot ? 2 : 1;
  }

  auto& lu = ws.lu;
  lu.compute(A);
  const Eigen::VectorXd rhs = dirichlet.matrix();
  const Eigen::VectorXd sol = lu.solve(rhs);
  const double rcond = lu.rcond();
  SolveDiagnostics diag{(A * sol - rhs).cwiseAbs().maxCoeff(), rcond > 0.0 ? 1.0 / rcond : INFINITY};
  if (!(diag.condition < kMaxCondition) || !sol.allFinite())
    throw ConditioningError("fit_modal_potential: collocation system is ill-conditioned", diag.condition);

  ModalPotential pot;
  pot.nx = grid.nx;
  pot.ny = grid.ny;
  pot.depth = grid.depth;
  pot.reference_height = height;
  pot.coeffs.assign(N, {0.0, 0.0});
  pot.scale.resize(N);
  for (int s = 0; s < N; ++s) pot.scale[s] = std::cosh(lat.modes[s].kabs * height);
  col = 0;
  for (const auto& [slot, partner] : classes) {
    if (partner == slot) {
      pot.coeffs[slot] = sol[col];
      col += 1;
    } else {
      pot.coeffs[slot] = 0.5 * std::complex<double>(sol[col], -sol[col + 1]);
      pot.coeffs[partner] = std::conj(pot.coeffs[slot]);
      col += 2;
    }
  }
  pot.diagnostics = diag;
  return pot;
}

struct SurfaceTrace {
  SurfaceField phi;
  SurfaceField phi_x;
  SurfaceField phi_y;
  SurfaceField phi_z;
};

inline void require_compatible(const PeriodicGrid& grid, const ModalPotential& pot) {
  if (pot.nx != grid.nx || pot.ny != grid.ny || pot.depth != grid.depth)
    throw std::invalid_argument("potential was fitted on a different grid");
}

/// Potential and its gradient at (x_j, eta_j), term by term.
inline SurfaceTrace evaluate_on_surface(const PeriodicGrid& grid, const SurfaceField& eta,
                                        const ModalPotential& pot) {
  require_on_grid(grid, eta, "evaluate eta");
  require_compatible(grid, pot);
  const auto lat = detail::make_lattice(grid);
  detail::check_exponent(lat, grid.depth + std::max(eta.maxCoeff(), pot.reference_height - grid.depth));
  const auto vp = detail::vertical_profiles(lat, eta, grid.depth, pot.reference_height);

  const int N = grid.size();
  SurfaceTrace tr{SurfaceField::Zero(N), SurfaceField::Zero(N), SurfaceField::Zero(N),
                  SurfaceField::Zero(N)};
  std::vector<std::complex<double>> e;
  for (int s = 0; s < N; ++s) {
    const std::complex<double> c = pot.coeffs[s];
    if (c == 0.0) continue;
    const auto& mode = lat.modes[s];
    detail::mode_phases(lat, grid, mode, e);
    for (int i = 0; i < N; ++i) {
      const auto ce = c * e[i];
      const double cz = vp.c(i, mode.shell);
      tr.phi[i] += ce.real() * cz;
      tr.phi_x[i] -= mode.kx * ce.imag() * cz;
      tr.phi_y[i] -= mode.ky * ce.imag() * cz;
      tr.phi_z[i] += mode.kabs * ce.real() * vp.s(i, mode.shell);
    }
  }
  return tr;
}

struct GradientTriple {
  SurfaceField x;
  SurfaceField y;
  SurfaceField z;
};

inline GradientTriple surface_gradient_of_potential(const PeriodicGrid& grid,
                                                    const SurfaceField& eta,
                                                    const ModalPotential& pot) {
  auto tr = evaluate_on_surface(grid, eta, pot);
  return {std::move(tr.phi_x), std::move(tr.phi_y), std::move(tr.phi_z)};
}

struct BedTrace {
  SurfaceField phi;
  SurfaceField phi_x;
  SurfaceField phi_y;
};

/// Values at z = -h, where every cosh factor is 1 / scale_k.
inline BedTrace bottom_trace(const PeriodicGrid& grid, const ModalPotential& pot) {
  require_compatible(grid, pot);
  Spectrum spec(pot.coeffs.size());
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] = pot.coeffs[s] / pot.scale[s];
  SurfaceField phi = from_spectrum(grid, spec);
  auto grad = spectral_gradient(grid, phi);
  return {std::move(phi), std::move(grad.x), std::move(grad.y)};
}

/// Kinematic rate through the Dirichlet-to-Neumann route.
inline SurfaceField dno_eta_t(const PeriodicGrid& grid, const SurfaceState& state,
                              SolveDiagnostics* diag = nullptr) {
  validate_state(grid, state);
  const auto pot = fit_modal_potential(grid, state.eta, state.q);
  if (diag) *diag = pot.diagnostics;
  const auto tr = evaluate_on_surface(grid, state.eta, pot);
  const auto deta = spectral_gradient(grid, state.eta);
  return tr.phi_z - tr.phi_x * deta.x - tr.phi_y * deta.y;
}

/// Extension of the time derivative of the potential, from its surface
/// value q_t - phi_z eta_t.
inline ModalPotential fit_potential_rate(const PeriodicGrid& grid, const SurfaceField& eta,
                                         const SurfaceField& eta_t, const SurfaceField& q_t,
                                         const ModalPotential& phi) {
  const auto tr = evaluate_on_surface(grid, eta, phi);
  return fit_modal_potential(grid, eta, q_t - tr.phi_z * eta_t);
}

}  // namespace wavelaw
