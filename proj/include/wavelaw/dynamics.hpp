#pragma once

#include "wavelaw/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavelaw {

enum class KinematicSolver { nonlocal, dno };

inline const char* to_string(KinematicSolver s) {
  return s == KinematicSolver::nonlocal ? "nonlocal" : "dno";
}

inline KinematicSolver parse_kinematic_solver(const std::string& name) {
  if (name == "nonlocal") return KinematicSolver::nonlocal;
  if (name == "dno") return KinematicSolver::dno;
  throw std::invalid_argument("unknown kinematic solver '" + name + "'");
}

/// Maximum surface slope and lowest trough accepted by the stepper.
inline constexpr double kMaxSlope = 0.5;
inline constexpr double kMinDepthFraction = 0.9;

class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(double t, std::string metric, double value)
      : std::runtime_error("guard violated at t = " + std::to_string(t) + ": " + metric + " = " +
                           std::to_string(value)),
        t_(t), metric_(std::move(metric)), value_(value) {}
  double time() const { return t_; }
  const std::string& metric() const { return metric_; }
  double value() const { return value_; }

 private:
  double t_;
  std::string metric_;
  double value_;
};

inline double max_slope(const PeriodicGrid& grid, const SurfaceField& eta) {
  const auto g = spectral_gradient(grid, eta);
  return (g.x.square() + g.y.square()).sqrt().maxCoeff();
}

inline void check_guard(const PeriodicGrid& grid, const SurfaceState& s) {
  const double slope = max_slope(grid, s.eta);
  if (!(slope <= kMaxSlope)) throw GuardViolation(s.t, "max |grad eta|", slope);
  const double trough = s.eta.minCoeff();
  if (!(trough > -kMinDepthFraction * grid.depth)) throw GuardViolation(s.t, "min eta", trough);
}

/// Kinematic rate from the nonlocal constraints
///   sum_j e^{ik.x_j} [ i eta_t cosh(|k|(eta+h)) + (k.grad q)/|k| sinh(|k|(eta+h)) ] = 0
/// for one representative of each conjugate lattice class, split into real
/// and imaginary rows, plus the zero-mean row in place of k = 0. Rows are
/// divided by cosh(|k|(h + max eta)).
inline SurfaceField solve_kinematic_nonlocal(const PeriodicGrid& grid, const SurfaceState& state,
                                             SolveDiagnostics* diag = nullptr) {
  validate_state(grid, state);
  const auto lat = detail::make_lattice(grid);
  const double height = grid.depth + state.eta.maxCoeff();
  detail::check_exponent(lat, height);
  const auto vp = detail::vertical_profiles(lat, state.eta, grid.depth, height);
  const auto dq = spectral_gradient(grid, state.q);
  const auto classes = detail::conjugate_classes(grid);

  const int N = grid.size();
  // Assembled transposed: column r of At is constraint row r.
  auto& ws = detail::dense_workspace(N);
  auto& At = ws.matrix;
  Eigen::VectorXd b(N);
  std::vector<std::complex<double>> e;
  int row = 0;
  for (const auto& [slot, partner] : classes) {
    const auto& mode = lat.modes[slot];
    if (slot == 0) {
      At.col(row).setOnes();
      b[row] = 0.0;
      ++row;
      continue;
    }
    const bool paired = partner != slot;
    detail::mode_phases(lat, grid, mode, e);
    double re_rhs = 0.0, im_rhs = 0.0;
    for (int i = 0; i < N; ++i) {
      const double c = vp.c(i, mode.shell);
      const double drive = (mode.kx * dq.x[i] + mode.ky * dq.y[i]) / mode.kabs * vp.s(i, mode.shell);
      if (paired) At(i, row) = -e[i].imag() * c;
      At(i, row + (paired ? 1 : 0)) = e[i].real() * c;
      re_rhs -= e[i].real() * drive;
      im_rhs -= e[i].imag() * drive;
    }
    if (paired) {
      b[row] = re_rhs;
      b[row + 1] = im_rhs;
      row += 2;
    } else {
      b[row] = im_rhs;
      row += 1;
    }
  }

  auto& lu = ws.lu;
  lu.compute(At.transpose());
  const Eigen::VectorXd x = lu.solve(b);
  const double rcond = lu.rcond();
  const SolveDiagnostics d{(At.transpose() * x - b).cwiseAbs().maxCoeff(), rcond > 0.0 ? 1.0 / rcond : INFINITY};
  if (diag) *diag = d;
  if (!(d.condition < kMaxCondition) || !x.allFinite())
    throw ConditioningError("solve_kinematic_nonlocal: constraint system is ill-conditioned", d.condition);
  return x.array();
}

/// q_t from the surface Bernoulli relation, products on the padded grid.
inline SurfaceField bernoulli_q_t(const PeriodicGrid& grid, const SurfaceState& state,
                                  const SurfaceField& eta_t) {
  validate_state(grid, state);
  require_on_grid(grid, eta_t, "eta_t");
  const auto dq = spectral_gradient(grid, state.q);
  const auto de = spectral_gradient(grid, state.eta);
  auto mul = [&](const SurfaceField& a, const SurfaceField& b) { return dealiased_product(grid, a, b); };

  const SurfaceField grad_q_sq = mul(dq.x, dq.x) + mul(dq.y, dq.y);
  const SurfaceField metric = 1.0 + mul(de.x, de.x) + mul(de.y, de.y);
  const SurfaceField vertical = eta_t + mul(dq.x, de.x) + mul(dq.y, de.y);
  SurfaceField q_t = -0.5 * grad_q_sq - grid.gravity * state.eta +
                     0.5 * mul(mul(vertical, vertical), metric.inverse());
  if (grid.surface_tension > 0.0) {
    const SurfaceField inv_norm = metric.rsqrt();
    q_t += grid.capillarity() * spectral_divergence(grid, mul(de.x, inv_norm), mul(de.y, inv_norm));
  }
  return q_t;
}

struct RatePair {
  SurfaceField eta_t;
  SurfaceField q_t;
};

inline SurfaceField kinematic_rate(const PeriodicGrid& grid, const SurfaceState& state,
                                   KinematicSolver solver, SolveDiagnostics* diag = nullptr) {
  return solver == KinematicSolver::nonlocal ? solve_kinematic_nonlocal(grid, state, diag)
                                             : dno_eta_t(grid, state, diag);
}

inline RatePair rates(const PeriodicGrid& grid, const SurfaceState& state,
                      KinematicSolver solver = KinematicSolver::nonlocal,
                      SolveDiagnostics* diag = nullptr) {
  SurfaceField eta_t = kinematic_rate(grid, state, solver, diag);
  SurfaceField q_t = bernoulli_q_t(grid, state, eta_t);
  return {std::move(eta_t), std::move(q_t)};
}

/// Classical RK4. `first_stage` may carry rates already evaluated at `state`.
inline SurfaceState step_rk4(const PeriodicGrid& grid, const SurfaceState& state, double dt,
                             KinematicSolver solver = KinematicSolver::nonlocal,
                             const RatePair* first_stage = nullptr) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  check_guard(grid, state);
  auto stage = [&](const SurfaceState& s) {
    try {
      return rates(grid, s, solver);
    } catch (const ConditioningError& e) {
      throw ConditioningError(std::string(e.what()) + " during step from t = " + std::to_string(state.t),
                              e.condition());
    }
  };
  auto shifted = [&](const RatePair& k, double h) {
    return SurfaceState{state.t + h, state.eta + h * k.eta_t, state.q + h * k.q_t};
  };

  const RatePair k1 = first_stage ? *first_stage : stage(state);
  const RatePair k2 = stage(shifted(k1, 0.5 * dt));
  const RatePair k3 = stage(shifted(k2, 0.5 * dt));
  const RatePair k4 = stage(shifted(k3, dt));
  SurfaceState next{state.t + dt,
                    state.eta + dt / 6.0 * (k1.eta_t + 2.0 * k2.eta_t + 2.0 * k3.eta_t + k4.eta_t),
                    state.q + dt / 6.0 * (k1.q_t + 2.0 * k2.q_t + 2.0 * k3.q_t + k4.q_t)};
  check_guard(grid, next);
  return next;
}

}  // namespace wavelaw
