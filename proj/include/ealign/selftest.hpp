#pragma once

/// Operator identities checked by `ealign selftest`.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ealign/closedform.hpp"
#include "ealign/fracops.hpp"
#include "ealign/grid.hpp"

namespace ealign {

struct SelftestRecord {
  std::string op;
  double alpha = 0.0;  // 0 when the identity does not depend on alpha
  std::size_t n = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

struct SelftestOptions {
  /// Multiplies every tolerance (0.5 for the strict profile).
  double tolerance_scale = 1.0;
  unsigned seed = 12345;
  bool inject_hilbert_sign_error = false;
};

/// Max over |x| <= 0.9 of |Lambda^a Phi_a - 1| with the whole-line spectral operator.
inline double getoor_identity_error_spectral(FracOrder alpha, std::size_t n = 8192, double L = 8.0) {
  const Grid1D g(n, L);
  SpectralWorkspace ws(g);
  const Field phi = Field::sample(g, [&](double x) { return getoor_profile(alpha, x); });
  const Field lap = fractional_laplacian_free(phi, alpha, ws);
  double err = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(g.x(j)) <= 0.9) err = std::max(err, std::abs(lap[j] - 1.0));
  return err;
}

/// Same with the singular-integral oracle on grid samples, at x = -0.9, -0.8, ..., 0.9.
inline double getoor_identity_error_quadrature(FracOrder alpha, std::size_t n = 8192, double L = 8.0) {
  const Grid1D g(n, L);
  const Field phi = Field::sample(g, [&](double x) { return getoor_profile(alpha, x); });
  double err = 0.0;
  for (int i = -9; i <= 9; ++i)
    err = std::max(err, std::abs(fractional_laplacian_quadrature(phi, alpha, 0.1 * i) - 1.0));
  return err;
}

inline std::vector<SelftestRecord> run_selftest(const SelftestOptions& opt = {}) {
  std::vector<SelftestRecord> out;
  const double ts = opt.tolerance_scale;
  auto add = [&](std::string op, double alpha, std::size_t n, double err, double tol) {
    out.push_back({std::move(op), alpha, n, err, tol * ts});
  };
  const double alphas[] = {0.25, 0.5, 0.75};

  for (double a : alphas) {
    add("getoor_identity_spectral", a, 8192, getoor_identity_error_spectral(FracOrder(a)), 2e-2);
    add("getoor_identity_quadrature", a, 8192, getoor_identity_error_quadrature(FracOrder(a)), 1e-2);
  }

  // Periodic multipliers on [-pi, pi).
  const Grid1D g(64, std::numbers::pi);
  SpectralWorkspace ws(g);
  ws.inject_hilbert_sign_error(opt.inject_hilbert_sign_error);
  auto max_diff = [](const Field& a, const Field& b) { return (a - b).max_abs(); };
  {
    const Field c = Field::sample(g, [](double x) { return std::cos(3.0 * x); });
    const Field s = Field::sample(g, [](double x) { return std::sin(3.0 * x); });
    add("hilbert_cos_to_sin", 0.0, 64, max_diff(hilbert_transform(c, ws), s), 1e-12);
    add("fraclap_eigenfunction", 0.5, 64,
        max_diff(fractional_laplacian_spectral(c, FracOrder(0.5), ws), std::sqrt(3.0) * c), 1e-12);
  }
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_smooth = [&] {
    // a few low modes plus a constant
    std::vector<double> coef(12);
    for (double& v : coef) v = normal(rng);
    return Field::sample(g, [&](double x) {
      double s = coef[0];
      for (int k = 1; k <= 5; ++k) s += coef[2 * k] * std::cos(k * x) + coef[2 * k + 1] * std::sin(k * x);
      return s;
    });
  };
  {
    const Field f = random_smooth();
    const double mean = integrate(f) / g.length();
    const Field centered = f - Field::sample(g, [&](double) { return mean; });
    add("hilbert_involution", 0.0, 64, max_diff(hilbert_transform(hilbert_transform(f, ws), ws), -1.0 * centered),
        1e-12);
    double worst_inv = 0.0, worst_mean = 0.0;
    for (double a : alphas) {
      const Field lap = fractional_laplacian_spectral(f, FracOrder(a), ws);
      worst_inv = std::max(worst_inv, max_diff(riesz_potential(lap, a, ws), centered));
      worst_mean = std::max(worst_mean, std::abs(integrate(lap)) / std::max(1.0, f.max_abs()));
    }
    add("riesz_inverse", 0.0, 64, worst_inv, 1e-10);
    add("fraclap_zero_mean", 0.0, 64, worst_mean, 1e-12);
  }

  for (double a : alphas) {
    const FracOrder alpha(a);
    // F(a', b, b; z) = (1-z)^{-a'}
    double collapse = 0.0;
    for (double z : {0.01, 0.1, 0.25, 0.4})
      collapse = std::max(collapse, std::abs(special::hypergeometric_series(1.0 + 0.5 * a, 0.5 * (1.0 + a),
                                                                           0.5 * (1.0 + a), z) -
                                             std::pow(1.0 - z, -(1.0 + 0.5 * a))));
    add("hypergeometric_binomial_collapse", a, 0, collapse, 1e-10);
    const auto prof = velocity_profile(alpha);
    add("tail_integral_minus_one", a, 0, std::abs(prof->tail_at_one() + 1.0), 1e-8);
    add("velocity_jump_across_support", a, 0, std::abs((*prof)(1.0) - (*prof)(-1.0) - 2.0), 1e-12);
    const double quad = boost::math::quadrature::tanh_sinh<double>().integrate(
        [&](double x) { return getoor_profile(alpha, x); }, -1.0, 1.0);
    add("getoor_mass", a, 0, std::abs(quad - getoor_mass(alpha)), 1e-10);
  }
  add("getoor_constant_alpha_to_one", 1.0, 0, std::abs(getoor_constant(1.0) - 1.0), 1e-12);
  return out;
}

}  // namespace ealign
