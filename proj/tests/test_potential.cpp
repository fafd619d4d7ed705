#include "oracles.hpp"

#include "wavelaw/potential.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace wavelaw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using oracle::pi;

namespace {

PeriodicGrid box(int nx, int ny, double lx = 2 * pi, double ly = 2 * pi, double h = 1.0) {
  return make_grid(lx, ly, nx, ny, h, 9.81, 1000, 0);
}

SurfaceField cosx(const PeriodicGrid& g, int m = 1) {
  return sample(g, [m](double x, double) { return std::cos(m * x); });
}

// Independent solver for y-independent data: Taylor-expand each
// cosh(|k|(eta + h)) about z = 0 and iterate
//   a <- DFT(d - sum_{j>=1} eta^j / j! d^j/dz^j phi(., 0))
// with a direct DFT. Returns coefficients a_m, m in [-n/2, n/2), of
// phi = sum a_m cosh(|k|(z + h)) / cosh(|k| h) exp(i m x).
std::vector<oracle::cplx> perturbation_fit(int n, double h, const std::vector<double>& eta,
                                           const std::vector<double>& data) {
  std::vector<oracle::cplx> a(n, 0.0);
  auto dft = [&](const std::vector<double>& f) {
    std::vector<oracle::cplx> out(n);
    for (int p = 0; p < n; ++p) {
      const int m = p - n / 2;
      oracle::cplx acc = 0.0;
      for (int j = 0; j < n; ++j) acc += f[j] * std::polar(1.0, -2 * pi * m * j / n);
      out[p] = acc / double(n);
    }
    return out;
  };
  auto derivative_at_nodes = [&](int order) {
    std::vector<double> out(n, 0.0);
    for (int p = 0; p < n; ++p) {
      const int m = p - n / 2;
      const double k = std::abs(m);
      const double factor = std::pow(k, order) * (order % 2 ? std::tanh(k * h) : 1.0);
      for (int j = 0; j < n; ++j) out[j] += (factor * a[p] * std::polar(1.0, 2 * pi * m * j / n)).real();
    }
    return out;
  };
  for (int iter = 0; iter < 80; ++iter) {
    std::vector<double> rhs = data;
    for (int order = 1; order <= 40; ++order) {
      const auto d = derivative_at_nodes(order);
      double fact = 1.0;
      for (int q = 2; q <= order; ++q) fact *= q;
      for (int j = 0; j < n; ++j) rhs[j] -= std::pow(eta[j], order) / fact * d[j];
    }
    a = dft(rhs);
  }
  return a;
}

}  // namespace

TEST_CASE("flat fit of cos x is a single mode pair", "[potential]") {
  const auto g = box(16, 8);
  const auto pot = fit_modal_potential(g, SurfaceField::Zero(g.size()), cosx(g));
  for (int s = 0; s < g.size(); ++s) {
    const int m = PeriodicGrid::signed_mode(s / g.ny, g.nx), n = PeriodicGrid::signed_mode(s % g.ny, g.ny);
    const double expect = (std::abs(m) == 1 && n == 0) ? 0.5 : 0.0;
    // scale_k = cosh(|k|) here, so c_k cosh(|k|(z+1))/scale_k reproduces cos(x) cosh(z+1)/cosh(1).
    CHECK(std::abs(pot.coeffs[s] - expect) < 1e-14);
  }
  const SurfaceField slice = SurfaceField::Constant(g.size(), -0.4);
  const auto tr = evaluate_on_surface(g, slice, pot);
  CHECK(oracle::max_abs(tr.phi - cosx(g) * std::cosh(0.6) / std::cosh(1.0)) < 1e-14);
}

TEST_CASE("flat fit of a constant is the mean mode", "[potential]") {
  const auto g = box(8, 8);
  const auto pot = fit_modal_potential(g, SurfaceField::Zero(g.size()), SurfaceField::Constant(g.size(), 2.5));
  CHECK(std::abs(pot.coeffs[0] - 2.5) < 1e-14);
  for (int s = 1; s < g.size(); ++s) CHECK(std::abs(pot.coeffs[s]) < 1e-14);
  const auto grad = surface_gradient_of_potential(g, SurfaceField::Zero(g.size()), pot);
  CHECK(oracle::max_abs(grad.x) < 1e-14);
  CHECK(oracle::max_abs(grad.y) < 1e-14);
  CHECK(oracle::max_abs(grad.z) < 1e-14);
}

TEST_CASE("fit on a perturbed surface reproduces its data", "[potential]") {
  const auto g = box(32, 4);
  const SurfaceField eta = 0.01 * cosx(g);
  const auto pot = fit_modal_potential(g, eta, cosx(g));
  CHECK(pot.diagnostics.residual < 1e-10);
  CHECK(oracle::max_abs(evaluate_on_surface(g, eta, pot).phi - cosx(g)) < 1e-10);
  CHECK(std::isfinite(pot.diagnostics.condition));
}

TEST_CASE("fit agrees with the operator-expansion oracle inside the fluid", "[potential]") {
  const auto g = box(32, 4);
  const SurfaceField eta = sample(g, [](double x, double) { return 0.01 * std::cos(x) + 0.004 * std::sin(3 * x); });
  const SurfaceField data = sample(g, [](double x, double) { return std::cos(x) - 0.3 * std::sin(2 * x + 0.2); });
  const auto pot = fit_modal_potential(g, eta, data);

  std::vector<double> e1(g.nx), d1(g.nx);
  for (int j = 0; j < g.nx; ++j) e1[j] = eta[g.index(j, 0)], d1[j] = data[g.index(j, 0)];
  const auto a = perturbation_fit(g.nx, g.depth, e1, d1);

  for (double z : {-0.8, -0.5, -0.2}) {
    const auto tr = evaluate_on_surface(g, SurfaceField::Constant(g.size(), z), pot);
    double worst = 0.0;
    for (int j = 0; j < g.nx; ++j) {
      double ref = 0.0;
      for (int p = 0; p < g.nx; ++p) {
        const double k = std::abs(p - g.nx / 2);
        ref += (a[p] * std::cosh(k * (z + 1)) / std::cosh(k) * std::polar(1.0, 2 * pi * (p - g.nx / 2) * j / g.nx)).real();
      }
      for (int l = 0; l < g.ny; ++l) worst = std::max(worst, std::abs(tr.phi[g.index(j, l)] - ref));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("flat vertical derivative and bed trace", "[potential]") {
  const auto g = box(16, 8);
  const SurfaceField flat = SurfaceField::Zero(g.size());
  const auto pot = fit_modal_potential(g, flat, cosx(g));
  const auto grad = surface_gradient_of_potential(g, flat, pot);
  CHECK(oracle::max_abs(grad.z - std::tanh(1.0) * cosx(g)) < 1e-14);
  CHECK(oracle::max_abs(grad.x + sample(g, [](double x, double) { return std::sin(x); })) < 1e-14);

  const auto bed = bottom_trace(g, pot);
  CHECK(oracle::max_abs(bed.phi - cosx(g) / std::cosh(1.0)) < 1e-14);
  CHECK(oracle::max_abs(bed.phi_y) < 1e-14);

  const auto cpot = fit_modal_potential(g, flat, SurfaceField::Constant(g.size(), -1.5));
  const auto cbed = bottom_trace(g, cpot);
  CHECK(oracle::max_abs(cbed.phi + 1.5) < 1e-14);
  CHECK(oracle::max_abs(cbed.phi_x) < 1e-14);
}

TEST_CASE("bed Neumann value vanishes for any potential", "[potential]") {
  const auto g = box(16, 16, 3.0, 4.0, 0.7);
  const SurfaceField eta = 0.02 * oracle::band_limited(g, 3, 3, 9);
  const auto pot = fit_modal_potential(g, eta, oracle::band_limited(g, 6, 6, 10));
  const auto at_bed = evaluate_on_surface(g, SurfaceField::Constant(g.size(), -g.depth), pot);
  CHECK(oracle::max_abs(at_bed.phi_z) == 0.0);
  CHECK(oracle::max_abs(at_bed.phi - bottom_trace(g, pot).phi) < 1e-12);
}

TEST_CASE("chain rule on the surface", "[potential]") {
  const auto g = box(32, 32);
  const double s = g.lx / 8;
  const SurfaceField eta = oracle::periodic_gaussian(g, 0.02, s, pi, pi);
  const SurfaceField q = oracle::periodic_gaussian(g, 0.05, s, pi + 0.3, pi);
  const auto pot = fit_modal_potential(g, eta, q);
  const auto grad = surface_gradient_of_potential(g, eta, pot);
  const auto dq = spectral_gradient(g, q);
  const auto de = spectral_gradient(g, eta);
  CHECK(oracle::max_abs(dq.x - (grad.x + grad.z * de.x)) < 1e-8);
  CHECK(oracle::max_abs(dq.y - (grad.y + grad.z * de.y)) < 1e-8);
}

TEST_CASE("DNO examples on the flat surface", "[potential]") {
  const auto g = box(16, 8);
  const SurfaceField flat = SurfaceField::Zero(g.size());
  CHECK(oracle::max_abs(dno_eta_t(g, {0.0, flat, cosx(g)}) - std::tanh(1.0) * cosx(g)) < 1e-13);
  CHECK(oracle::max_abs(dno_eta_t(g, {0.0, flat, cosx(g, 2)}) - 2 * std::tanh(2.0) * cosx(g, 2)) < 1e-13);
  CHECK(oracle::max_abs(dno_eta_t(g, {0.0, 0.05 * cosx(g), flat})) == 0.0);
}

TEST_CASE("DNO recovers the linear symbol", "[potential]") {
  const auto g = box(16, 12, 3.0, 5.0, 0.8);
  const SurfaceField flat = SurfaceField::Zero(g.size());
  for (auto [m, n] : {std::pair{1, 0}, {0, 2}, {3, -2}, {5, 4}, {7, 5}}) {
    const double kx = g.kx(m), ky = g.ky(n), k = std::hypot(kx, ky);
    const SurfaceField q = sample(g, [&](double x, double y) { return std::sin(kx * x + ky * y + 0.4); });
    CHECK(oracle::max_abs(dno_eta_t(g, {0.0, flat, q}) - k * std::tanh(k * g.depth) * q) < 1e-10);
  }
}

TEST_CASE("flat DNO is self-adjoint", "[potential]") {
  const auto g = box(16, 16, 4.0, 3.0, 1.2);
  const SurfaceField flat = SurfaceField::Zero(g.size());
  const auto f = oracle::band_limited(g, 7, 7, 21);
  const auto h = oracle::band_limited(g, 7, 7, 22);
  const double a = integrate_surface(g, f * dno_eta_t(g, {0.0, flat, h}));
  const double b = integrate_surface(g, h * dno_eta_t(g, {0.0, flat, f}));
  CHECK(std::abs(a - b) < 1e-10 * std::max(std::abs(a), 1.0));
}

TEST_CASE("DNO rate has zero mean on a curved surface", "[potential]") {
  const auto g = box(24, 24);
  const SurfaceField eta = 0.03 * oracle::band_limited(g, 3, 3, 31) / 10.0;
  const SurfaceField q = oracle::band_limited(g, 5, 5, 32);
  const auto eta_t = dno_eta_t(g, {0.0, eta, q});
  CHECK(std::abs(integrate_surface(g, eta_t)) < 1e-9 * g.area() * oracle::max_abs(eta_t));
}

TEST_CASE("potential rate extension recovers phi_t", "[potential]") {
  // phi(x, z, t) = e^t cos(x) cosh(z + 1), so phi_t = phi.
  const auto g = box(32, 4);
  const SurfaceField eta = sample(g, [](double x, double) { return 0.03 * std::sin(x + 0.5); });
  const SurfaceField eta_t = sample(g, [](double x, double) { return 0.2 * std::cos(2 * x); });
  const SurfaceField phi_s = cosx(g) * (eta + 1.0).cosh();
  const SurfaceField phi_z = cosx(g) * (eta + 1.0).sinh();
  const SurfaceField q_t = phi_s + phi_z * eta_t;

  const auto pot = fit_modal_potential(g, eta, phi_s);
  const auto pot_t = fit_potential_rate(g, eta, eta_t, q_t, pot);
  CHECK(oracle::max_abs(evaluate_on_surface(g, eta, pot_t).phi - phi_s) < 1e-9);
  CHECK(oracle::max_abs(bottom_trace(g, pot_t).phi - cosx(g)) < 1e-9);
}

TEST_CASE("fit rejects invalid surfaces", "[potential]") {
  const auto g = box(8, 8);
  SurfaceField eta = SurfaceField::Zero(g.size());
  eta[3] = -1.0;
  CHECK_THROWS_AS(fit_modal_potential(g, eta, SurfaceField::Zero(g.size())), std::invalid_argument);
  CHECK_THROWS_AS(fit_modal_potential(g, SurfaceField::Zero(5), SurfaceField::Zero(g.size())),
                  std::invalid_argument);

  // |k|max (h + max eta) above the cap.
  const auto tiny = make_grid(1.0, 1.0, 64, 64, 3.0, 9.81, 1000, 0);
  CHECK_THROWS_AS(fit_modal_potential(tiny, SurfaceField::Zero(tiny.size()), SurfaceField::Zero(tiny.size())),
                  std::domain_error);
}

TEST_CASE("steep short-box surface is reported as ill-conditioned", "[potential]") {
  const auto g = make_grid(2 * pi, 2 * pi, 48, 4, 1.0, 9.81, 1000, 0);
  const SurfaceField eta = 0.6 * cosx(g);
  bool thrown = false;
  try {
    fit_modal_potential(g, eta, cosx(g));
  } catch (const ConditioningError& e) {
    thrown = true;
    CHECK(e.condition() >= kMaxCondition);
  }
  CHECK(thrown);
}
