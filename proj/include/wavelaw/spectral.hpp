#pragma once

#include "wavelaw/grid.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace wavelaw {

using Spectrum = std::vector<std::complex<double>>;

namespace detail {

// Forward and backward 2D complex plans for one (n0, n1) shape. Planner calls
// are serialised; execution through fftw_execute_dft is re-entrant.
class FftPlans {
 public:
  FftPlans(int n0, int n1) {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n0) * n1);
    std::vector<std::complex<double>> b(a.size());
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    forward_ = fftw_plan_dft_2d(n0, n1, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_2d(n0, n1, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void forward(Spectrum& in, Spectrum& out) const { run(forward_, in, out); }
  void backward(Spectrum& in, Spectrum& out) const { run(backward_, in, out); }

 private:
  static void run(fftw_plan p, Spectrum& in, Spectrum& out) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
  fftw_plan forward_;
  fftw_plan backward_;
};

inline const FftPlans& plans_for(int n0, int n1) {
  static std::mutex lock;
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
  std::lock_guard guard(lock);
  auto& slot = cache[{n0, n1}];
  if (!slot) slot = std::make_unique<FftPlans>(n0, n1);
  return *slot;
}

}  // namespace detail

/// Fourier amplitudes F with f(x_j) = sum_k F_k exp(i k.x_j), FFT slot order.
inline Spectrum to_spectrum(const PeriodicGrid& grid, const SurfaceField& f) {
  Spectrum in(grid.size()), out(grid.size());
  for (int i = 0; i < grid.size(); ++i) in[i] = f[i];
  detail::plans_for(grid.nx, grid.ny).forward(in, out);
  const double norm = 1.0 / grid.size();
  for (auto& c : out) c *= norm;
  return out;
}

/// Real part of the inverse transform of amplitudes in FFT slot order.
inline SurfaceField from_spectrum(const PeriodicGrid& grid, Spectrum spec) {
  Spectrum out(grid.size());
  detail::plans_for(grid.nx, grid.ny).backward(spec, out);
  SurfaceField f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = out[i].real();
  return f;
}

struct Gradient {
  SurfaceField x;
  SurfaceField y;
};

/// Derivative of the trigonometric interpolant. The Nyquist column of each
/// derivative direction is dropped.
inline Gradient spectral_gradient(const PeriodicGrid& grid, const SurfaceField& f) {
  require_on_grid(grid, f, "spectral_gradient");
  const Spectrum fh = to_spectrum(grid, f);
  Spectrum gx(fh.size()), gy(fh.size());
  const std::complex<double> I(0.0, 1.0);
  for (int p = 0; p < grid.nx; ++p) {
    const int m = PeriodicGrid::signed_mode(p, grid.nx);
    const double kx = (2 * m == -grid.nx) ? 0.0 : grid.kx(m);
    for (int r = 0; r < grid.ny; ++r) {
      const int n = PeriodicGrid::signed_mode(r, grid.ny);
      const double ky = (2 * n == -grid.ny) ? 0.0 : grid.ky(n);
      const int i = grid.index(p, r);
      gx[i] = I * kx * fh[i];
      gy[i] = I * ky * fh[i];
    }
  }
  return {from_spectrum(grid, std::move(gx)), from_spectrum(grid, std::move(gy))};
}

inline SurfaceField spectral_divergence(const PeriodicGrid& grid, const SurfaceField& fx,
                                        const SurfaceField& fy) {
  return spectral_gradient(grid, fx).x + spectral_gradient(grid, fy).y;
}

/// Product on a 3/2 zero-padded grid, truncated back to the modes strictly
/// inside the Nyquist band. Input Nyquist amplitudes are split evenly between
/// the +N/2 and -N/2 slots of the padded spectrum so the padded field stays real.
inline SurfaceField dealiased_product(const PeriodicGrid& grid, const SurfaceField& f,
                                      const SurfaceField& g) {
  require_on_grid(grid, f, "dealiased_product");
  require_on_grid(grid, g, "dealiased_product");
  const int nx = grid.nx, ny = grid.ny;
  const int px = 3 * nx / 2, py = 3 * ny / 2;
  const auto& padded = detail::plans_for(px, py);

  auto pad = [&](const SurfaceField& field) {
    const Spectrum fh = to_spectrum(grid, field);
    Spectrum big(static_cast<std::size_t>(px) * py, {0.0, 0.0});
    for (int p = 0; p < nx; ++p) {
      const int m = PeriodicGrid::signed_mode(p, nx);
      const bool nyq_x = 2 * m == -nx;
      for (int r = 0; r < ny; ++r) {
        const int n = PeriodicGrid::signed_mode(r, ny);
        const bool nyq_y = 2 * n == -ny;
        std::complex<double> c = fh[grid.index(p, r)];
        if (nyq_x) c *= 0.5;
        if (nyq_y) c *= 0.5;
        for (int sx = 0; sx < (nyq_x ? 2 : 1); ++sx) {
          const int mm = sx == 0 ? m : -m;
          for (int sy = 0; sy < (nyq_y ? 2 : 1); ++sy) {
            const int nn = sy == 0 ? n : -n;
            big[static_cast<std::size_t>((mm + px) % px) * py + (nn + py) % py] += c;
          }
        }
      }
    }
    Spectrum phys(big.size());
    padded.backward(big, phys);
    return phys;
  };

  Spectrum a = pad(f);
  const Spectrum b = pad(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {a[i].real() * b[i].real(), 0.0};
  Spectrum prod(a.size());
  padded.forward(a, prod);

  const double norm = 1.0 / (static_cast<double>(px) * py);
  Spectrum out(grid.size(), {0.0, 0.0});
  for (int p = 0; p < nx; ++p) {
    const int m = PeriodicGrid::signed_mode(p, nx);
    if (2 * m == -nx) continue;
    for (int r = 0; r < ny; ++r) {
      const int n = PeriodicGrid::signed_mode(r, ny);
      if (2 * n == -ny) continue;
      out[grid.index(p, r)] =
          prod[static_cast<std::size_t>((m + px) % px) * py + (n + py) % py] * norm;
    }
  }
  return from_spectrum(grid, std::move(out));
}

/// Rectangle rule over the periodic box.
inline double integrate_surface(const PeriodicGrid& grid, const SurfaceField& f) {
  require_on_grid(grid, f, "integrate_surface");
  return f.sum() * grid.cell_area();
}

}  // namespace wavelaw
