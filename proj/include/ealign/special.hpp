#pragma once

/// Special functions: Gamma on the whole real line, Hurwitz zeta, Gauss 2F1.

#include <array>
#include <cmath>
#include <numbers>

#include "ealign/error.hpp"

namespace ealign::special {

/// Gamma function; negative non-integer arguments go through the reflection formula.
inline double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw InputError("gamma pole at non-positive integer");
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * std::tgamma(1.0 - x));
  return std::tgamma(x);
}

/// 1/Gamma(x), zero at the poles.
inline double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / gamma_fn(x);
}

/// Hurwitz zeta sum_{k>=0} (q+k)^{-s} for q > 0, s != 1, by Euler-Maclaurin.
/// For s < 1 this is the analytic continuation, which is what differences of
/// conditionally convergent lattice sums need.
inline double hurwitz_zeta(double s, double q) {
  if (!(q > 0.0)) throw InputError("hurwitz_zeta needs q > 0");
  if (s == 1.0) throw InputError("hurwitz_zeta pole at s = 1");
  constexpr int kDirect = 16;
  // B_{2j} / (2j)!
  constexpr std::array<double, 8> kB = {
      1.0 / 12.0,           -1.0 / 720.0,          1.0 / 30240.0,        -1.0 / 1209600.0,
      1.0 / 47900160.0,     -691.0 / 1307674368000.0, 1.0 / 74724249600.0, -3617.0 / 10670622842880000.0};
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(q + k, -s);
  const double a = q + kDirect;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // rising factorial s(s+1)...(s+2j-2) times a^{-s-2j+1}
  double rising = s;
  double apow = std::pow(a, -s - 1.0);
  for (std::size_t j = 0; j < kB.size(); ++j) {
    const double term = kB[j] * rising * apow;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    const double m = 2.0 * static_cast<double>(j) + 1.0;
    rising *= (s + m) * (s + m + 1.0);
    apow /= a * a;
  }
  return sum;
}

/// Plain Gauss series for 2F1(a,b;c;z), |z| < 1. Stops when |term| < 1e-14 or after max_terms.
inline double hypergeometric_series(double a, double b, double c, double z, int max_terms = 500) {
  if (!(std::abs(z) < 1.0)) throw InputError("hypergeometric series needs |z| < 1");
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-14) break;
  }
  return sum;
}

/// 2F1(a,b;c;z) for 0 <= z < 1. Uses the series for z <= 1/2 and the 1-z connection
/// formula beyond (requires c-a-b not an integer).
inline double hypergeometric_2f1(double a, double b, double c, double z) {
  if (z <= 0.5) return hypergeometric_series(a, b, c, z);
  const double d = c - a - b;
  if (std::abs(d - std::round(d)) < 1e-12)
    throw InputError("2F1 connection formula needs non-integer c-a-b");
  const double w = 1.0 - z;
  const double g1 = gamma_fn(c) * gamma_fn(d) * rgamma(c - a) * rgamma(c - b);
  const double g2 = gamma_fn(c) * gamma_fn(-d) * rgamma(a) * rgamma(b);
  return g1 * hypergeometric_series(a, b, 1.0 - d, w) +
         g2 * std::pow(w, d) * hypergeometric_series(c - a, c - b, 1.0 + d, w);
}

}  // namespace ealign::special
