#pragma once

/// Nonlocal operators on a Grid1D: the fractional Laplacian (periodic multiplier,
/// whole-line version, singular-integral oracle), the Hilbert transform, the
/// Riesz potential, d/dx^{-1} Lambda^alpha, and the velocity reconstruction.
///
/// The periodic multipliers act on the torus [-L, L). For fields supported inside
/// the box, the *_free operators add the exact contribution of the periodic images
/// so the result is the whole-line operator applied to the zero extension.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <vector>

#include "ealign/error.hpp"
#include "ealign/grid.hpp"
#include "ealign/order.hpp"
#include "ealign/special.hpp"

namespace ealign {

namespace detail {

// FFTW's planner is not re-entrant; plan execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

/// Real-to-complex / complex-to-real pair of size n with owned buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        real_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        spec_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_.get(), spec_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_.get(), real_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }
  double* real() { return real_.get(); }
  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_.get()); }

  void forward() { fftw_execute(forward_); }
  /// Inverse transform including the 1/n normalization.
  void backward() {
    fftw_execute(backward_);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) real_.get()[j] *= s;
  }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwDeleter> real_;
  std::unique_ptr<fftw_complex, FftwDeleter> spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace detail

/// Image-sum kernels on z in (-2L, 2L), in units where w = z / (2L).
/// lambda: c_a sum_{k != 0} |z - 2Lk|^{-1-a}
/// antiderivative: -(c_a/a) sum_{k != 0} sgn(z+2Lk) |z + 2Lk|^{-a}
inline double image_kernel_fraclap(FracOrder alpha, double half_width, double z) {
  const double a = alpha.value();
  const double period = 2.0 * half_width;
  const double w = z / period;
  return fraclap_constant(alpha) * std::pow(period, -1.0 - a) *
         (special::hurwitz_zeta(1.0 + a, 1.0 - w) + special::hurwitz_zeta(1.0 + a, 1.0 + w));
}

inline double image_kernel_antiderivative(FracOrder alpha, double half_width, double z) {
  const double a = alpha.value();
  const double period = 2.0 * half_width;
  const double w = z / period;
  return -fraclap_constant(alpha) / a * std::pow(period, -a) *
         (special::hurwitz_zeta(a, 1.0 + w) - special::hurwitz_zeta(a, 1.0 - w));
}

/// FFT plans, scratch buffers and cached multipliers for one grid.
/// Not thread-safe: use one workspace per thread.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid1D& grid) : grid_(grid), fft_(grid.size()), padded_(2 * grid.size()) {}

  const Grid1D& grid() const { return grid_; }

  /// Test hook: flips the sign of the Hilbert multiplier to exercise failure paths.
  void inject_hilbert_sign_error(bool on = true) { hilbert_sign_ = on ? -1.0 : 1.0; }

  /// Multiplies the spectrum of f by m(k) for k = 0..n/2 and transforms back.
  template <class Multiplier>
  Field apply(const Field& f, Multiplier&& m) {
    require_grid(f);
    const std::size_t n = grid_.size();
    std::copy(f.values().begin(), f.values().end(), fft_.real());
    fft_.forward();
    auto* c = fft_.spectrum();
    for (std::size_t k = 0; k < fft_.spectrum_size(); ++k) c[k] *= m(k);
    fft_.backward();
    return Field(grid_, std::vector<double>(fft_.real(), fft_.real() + n));
  }

  /// h * sum_j f_j K(x_i - x_j) as a linear (non-periodic) convolution, where
  /// kernel_hat is the spectrum of the kernel sampled on the doubled grid.
  Field convolve(const Field& f, const std::vector<std::complex<double>>& kernel_hat) {
    require_grid(f);
    const std::size_t n = grid_.size();
    double* r = padded_.real();
    std::copy(f.values().begin(), f.values().end(), r);
    std::fill(r + n, r + 2 * n, 0.0);
    padded_.forward();
    auto* c = padded_.spectrum();
    for (std::size_t k = 0; k < padded_.spectrum_size(); ++k) c[k] *= kernel_hat[k];
    padded_.backward();
    const double h = grid_.spacing();
    std::vector<double> out(r, r + n);
    for (double& v : out) v *= h;
    return Field(grid_, std::move(out));
  }

  struct AlphaCache {
    double alpha = 0.0;
    std::vector<double> fraclap;                       // |xi|^a
    std::vector<std::complex<double>> antiderivative;  // -i sgn(xi) |xi|^{a-1}
    std::vector<std::complex<double>> image_fraclap_hat;
    std::vector<std::complex<double>> image_antiderivative_hat;
  };

  const AlphaCache& cache(FracOrder alpha) {
    for (const auto& c : caches_)
      if (c.alpha == alpha.value()) return c;
    caches_.push_back(build_cache(alpha));
    return caches_.back();
  }

  double hilbert_sign() const { return hilbert_sign_; }

 private:
  void require_grid(const Field& f) const {
    if (!(f.grid() == grid_)) throw InputError("field grid does not match the spectral workspace");
  }

  std::vector<std::complex<double>> kernel_spectrum(const std::vector<double>& sampled) {
    std::copy(sampled.begin(), sampled.end(), padded_.real());
    padded_.forward();
    return {padded_.spectrum(), padded_.spectrum() + padded_.spectrum_size()};
  }

  AlphaCache build_cache(FracOrder alpha) {
    const std::size_t n = grid_.size();
    const std::size_t m = n / 2 + 1;
    const double a = alpha.value();
    AlphaCache c;
    c.alpha = a;
    c.fraclap.resize(m);
    c.antiderivative.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double xi = grid_.rfft_wavenumber(k);
      c.fraclap[k] = k == 0 ? 0.0 : std::pow(xi, a);
      // odd multipliers vanish on the self-conjugate Nyquist mode
      c.antiderivative[k] = (k == 0 || k == n / 2) ? 0.0 : std::complex<double>(0.0, -std::pow(xi, a - 1.0));
    }
    const double h = grid_.spacing();
    const double L = grid_.half_width();
    std::vector<double> kf(2 * n, 0.0), ku(2 * n, 0.0);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      if (i == n) continue;
      const double z = i < n ? static_cast<double>(i) * h : (static_cast<double>(i) - 2.0 * static_cast<double>(n)) * h;
      kf[i] = image_kernel_fraclap(alpha, L, z);
      ku[i] = image_kernel_antiderivative(alpha, L, z);
    }
    c.image_fraclap_hat = kernel_spectrum(kf);
    c.image_antiderivative_hat = kernel_spectrum(ku);
    return c;
  }

  Grid1D grid_;
  detail::RealFft fft_;
  detail::RealFft padded_;
  std::deque<AlphaCache> caches_;
  double hilbert_sign_ = 1.0;
};

// ---- periodic multipliers ----------------------------------------------

/// Lambda^alpha on the torus: multiplier |xi|^alpha. Output has zero mean.
inline Field fractional_laplacian_spectral(const Field& f, FracOrder alpha, SpectralWorkspace& ws) {
  const auto& c = ws.cache(alpha);
  return ws.apply(f, [&](std::size_t k) { return std::complex<double>(c.fraclap[k], 0.0); });
}

/// Multiplier -i sgn(xi).
inline Field hilbert_transform(const Field& f, SpectralWorkspace& ws) {
  const std::size_t nyq = ws.grid().size() / 2;
  const double sign = ws.hilbert_sign();
  return ws.apply(f, [&](std::size_t k) {
    return (k == 0 || k == nyq) ? std::complex<double>(0.0) : std::complex<double>(0.0, -sign);
  });
}

/// Lambda^{-s}: multiplier |xi|^{-s} on nonzero modes, zero mode dropped.
inline Field riesz_potential(const Field& f, double s, SpectralWorkspace& ws) {
  if (!(s > 0.0 && s < 1.0)) throw InputError("riesz potential order must lie in (0,1)");
  const Grid1D& g = ws.grid();
  return ws.apply(f, [&](std::size_t k) {
    return k == 0 ? std::complex<double>(0.0) : std::complex<double>(std::pow(g.rfft_wavenumber(k), -s), 0.0);
  });
}

/// Lambda^{alpha/2}, used by the inequality checks.
inline Field fractional_laplacian_spectral_half(const Field& f, FracOrder alpha, SpectralWorkspace& ws) {
  const Grid1D& g = ws.grid();
  const double a = alpha.value();
  return ws.apply(f, [&](std::size_t k) {
    return k == 0 ? std::complex<double>(0.0) : std::complex<double>(std::pow(g.rfft_wavenumber(k), 0.5 * a), 0.0);
  });
}

/// Periodic d/dx^{-1} Lambda^alpha: multiplier -i sgn(xi)|xi|^{alpha-1}, zero-mean output.
inline Field antiderivative_fraclap_periodic(const Field& f, FracOrder alpha, SpectralWorkspace& ws) {
  const auto& c = ws.cache(alpha);
  return ws.apply(f, [&](std::size_t k) { return c.antiderivative[k]; });
}

// ---- whole-line operators -----------------------------------------------

/// Lambda^alpha of the zero extension of f to the real line, sampled on the grid.
inline Field fractional_laplacian_free(const Field& f, FracOrder alpha, SpectralWorkspace& ws) {
  Field out = fractional_laplacian_spectral(f, alpha, ws);
  out += ws.convolve(f, ws.cache(alpha).image_fraclap_hat);
  return out;
}

/// int_{-inf}^x Lambda^alpha f for the zero extension of f; tends to 0 at both infinities.
inline Field antiderivative_fraclap(const Field& f, FracOrder alpha, SpectralWorkspace& ws) {
  Field out = antiderivative_fraclap_periodic(f, alpha, ws);
  out += ws.convolve(f, ws.cache(alpha).image_antiderivative_hat);
  return out;
}

/// u = d/dx^{-1} G + d/dx^{-1} Lambda^alpha rho, normalized by u(-inf) = 0.
inline Field velocity_from_state(const Field& rho, const Field& G, FracOrder alpha, SpectralWorkspace& ws) {
  rho.require_same_grid(G);
  Field u = antiderivative(G);
  u += antiderivative_fraclap(rho, alpha, ws);
  return u;
}

// ---- singular-integral oracle -------------------------------------------

/// Lambda^alpha f(x) = c_a int_0^inf (2f(x) - f(x+z) - f(x-z)) z^{-1-a} dz for a
/// function vanishing outside [-support, support].
///
/// [0, z_min] (z_min = resolution/2) is replaced by its second-order Taylor value
/// -f''(x) z_min^{2-a}/(2-a); dyadic shells [z_min 2^m, z_min 2^{m+1}] use the
/// composite midpoint rule with node spacing <= resolution/4; beyond
/// R = support + |x| only 2f(x)/z^{1+a} remains and is integrated exactly.
template <class F>
double fractional_laplacian_quadrature(F&& f, FracOrder alpha, double x, double resolution, double support) {
  const double a = alpha.value();
  const double z_min = 0.5 * resolution;
  const double fx = f(x);
  const double R = support + std::abs(x);
  auto integrand = [&](double z) { return (2.0 * fx - f(x + z) - f(x - z)) * std::pow(z, -1.0 - a); };

  const double f2 = (f(x + z_min) - 2.0 * fx + f(x - z_min)) / (z_min * z_min);
  double total = -f2 * std::pow(z_min, 2.0 - a) / (2.0 - a);

  const double node_spacing = 0.25 * resolution;
  for (double lo = z_min; lo < R; lo *= 2.0) {
    const double hi = std::min(2.0 * lo, R);
    const auto m = static_cast<std::size_t>(std::ceil((hi - lo) / node_spacing));
    const double dz = (hi - lo) / static_cast<double>(m);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += integrand(lo + (static_cast<double>(i) + 0.5) * dz);
    total += s * dz;
  }
  total += 2.0 * fx * std::pow(R, -a) / a;
  return fraclap_constant(alpha) * total;
}

/// Four-point Lagrange interpolation of grid samples; zero outside [x_0, x_{n-1}].
inline double interpolate_cubic(const Field& f, double x) {
  const Grid1D& g = f.grid();
  const double s = (x - g.x(0)) / g.spacing();
  const auto n = static_cast<long>(g.size());
  if (s < 0.0 || s > static_cast<double>(n - 1)) return 0.0;
  const long j = std::clamp(static_cast<long>(std::floor(s)), 1L, n - 3);
  if (s < 1.0 || s > static_cast<double>(n - 2)) return interpolate_linear(f, x);
  const double t = s - static_cast<double>(j);
  const auto at = [&](long i) { return f[static_cast<std::size_t>(i)]; };
  return -t * (t - 1.0) * (t - 2.0) / 6.0 * at(j - 1) + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * at(j) -
         (t + 1.0) * t * (t - 2.0) / 2.0 * at(j + 1) + (t + 1.0) * t * (t - 1.0) / 6.0 * at(j + 2);
}

/// Oracle on grid samples, f extended by zero outside [-L, L).
inline double fractional_laplacian_quadrature(const Field& f, FracOrder alpha, double x) {
  const Grid1D& g = f.grid();
  if (!(std::abs(x) < g.half_width())) throw InputError("quadrature point outside the grid");
  return fractional_laplacian_quadrature([&](double y) { return interpolate_cubic(f, y); }, alpha, x, g.spacing(),
                                         g.half_width());
}

// ---- functional inequalities ---------------------------------------------

namespace detail {
inline void require_nonnegative(const Field& v, const char* who) {
  if (v.min() < 0.0) throw InputError(std::string(who) + " needs a nonnegative field");
}

/// ||Lambda^{a/2} w||_2^2 = int w Lambda^a w on the line (w supported in the box).
inline double half_derivative_energy(const Field& w, FracOrder alpha, SpectralWorkspace& ws) {
  const Field lw = fractional_laplacian_free(w, alpha, ws);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * lw[j];
  return s * w.grid().spacing();
}

inline Field pow_field(const Field& v, double p) {
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::pow(std::max(v[j], 0.0), p);
  return Field(v.grid(), std::move(out));
}
}  // namespace detail

struct StroockVaropoulosResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// int v^p Lambda^a v  >=  4p/(p+1)^2 int (Lambda^{a/2} v^{(p+1)/2})^2.
inline StroockVaropoulosResult stroock_varopoulos_check(const Field& v, double p, FracOrder alpha,
                                                        SpectralWorkspace& ws, double tol = 1e-8) {
  if (!(p >= 1.0)) throw InputError("Stroock-Varopoulos check needs p >= 1");
  detail::require_nonnegative(v, "Stroock-Varopoulos check");
  const Field lv = fractional_laplacian_free(v, alpha, ws);
  double lhs = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) lhs += std::pow(v[j], p) * lv[j];
  lhs *= v.grid().spacing();
  const double rhs =
      4.0 * p / ((p + 1.0) * (p + 1.0)) * detail::half_derivative_energy(detail::pow_field(v, 0.5 * (p + 1.0)), alpha, ws);
  return {lhs, rhs, lhs >= rhs - tol * std::abs(rhs)};
}

struct GagliardoNirenbergResult {
  double lhs = 0.0;
  double rhs_without_constant = 0.0;
  double ratio = 0.0;
};

/// ||v||_q^{theta1} against ||Lambda^{a/2}|v|^{r/2}||_2^2 ||v||_1^{theta2},
/// theta1 = q/(q-1) (r-1+a), theta2 = theta1 - r.
inline GagliardoNirenbergResult gagliardo_nirenberg_check(const Field& v, double r, double q, FracOrder alpha,
                                                          SpectralWorkspace& ws) {
  if (!(r > 2.0 && q > 1.0 && q < r && r < 2.0 * q))
    throw InputError("Gagliardo-Nirenberg exponents need r > 2, q > 1, q < r < 2q");
  detail::require_nonnegative(v, "Gagliardo-Nirenberg check");
  const double theta1 = q / (q - 1.0) * (r - 1.0 + alpha.value());
  const double theta2 = theta1 - r;
  GagliardoNirenbergResult res;
  res.lhs = std::pow(lp_norm(v, q), theta1);
  res.rhs_without_constant =
      detail::half_derivative_energy(detail::pow_field(v, 0.5 * r), alpha, ws) * std::pow(lp_norm(v, 1.0), theta2);
  res.ratio = res.rhs_without_constant == 0.0 ? 0.0 : res.lhs / res.rhs_without_constant;
  return res;
}

}  // namespace ealign
