#pragma once

/// Exact solutions used as oracles: the Getoor profile and its self-similar
/// solution of the nonlocal porous medium equation, the exterior values H of
/// Lambda^alpha Phi_alpha, and the rarefaction triple.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "ealign/error.hpp"
#include "ealign/order.hpp"
#include "ealign/special.hpp"

namespace ealign {

/// K(alpha,1) = Gamma(1/2) / (2^alpha Gamma(1+alpha/2) Gamma((1+alpha)/2)).
inline double getoor_constant(double alpha) {
  using special::gamma_fn;
  return gamma_fn(0.5) / (std::pow(2.0, alpha) * gamma_fn(1.0 + 0.5 * alpha) * gamma_fn(0.5 * (1.0 + alpha)));
}

inline double getoor_profile(FracOrder alpha, double x) {
  const double r = 1.0 - x * x;
  return r > 0.0 ? getoor_constant(alpha) * std::pow(r, 0.5 * alpha.value()) : 0.0;
}

/// Total mass of Phi_alpha: K(alpha,1) * B(1/2, 1+alpha/2).
inline double getoor_mass(FracOrder alpha) {
  using special::gamma_fn;
  const double a = alpha.value();
  return std::numbers::pi / (std::pow(2.0, a) * gamma_fn(0.5 * (1.0 + a)) * gamma_fn(0.5 * (3.0 + a)));
}

namespace detail {

struct TailSeries {
  double a, b, c, prefactor;
};

inline TailSeries tail_series(double alpha) {
  using special::gamma_fn;
  return {0.5 * (2.0 + alpha), 0.5 * (1.0 + alpha), 0.5 * (3.0 + alpha),
          gamma_fn(0.5) / (gamma_fn(-0.5 * alpha) * gamma_fn(0.5 * (3.0 + alpha)))};
}

}  // namespace detail

/// Lambda^alpha Phi_alpha(x) for |x| > 1 (negative).
inline double getoor_fraclap_tail(FracOrder alpha, double x) {
  const double ax = std::abs(x);
  if (!(ax > 1.0)) throw InputError("getoor_fraclap_tail needs |x| > 1");
  const auto s = detail::tail_series(alpha);
  return s.prefactor * std::pow(ax, -1.0 - alpha.value()) * special::hypergeometric_2f1(s.a, s.b, s.c, 1.0 / (ax * ax));
}

/// Lambda^alpha Phi_alpha everywhere except |x| = 1.
inline double getoor_fraclap(FracOrder alpha, double x) {
  return std::abs(x) < 1.0 ? 1.0 : getoor_fraclap_tail(alpha, x);
}

/// T(y) = int_y^inf H(s) ds for y >= 2, by termwise integration of the Gauss series.
inline double getoor_tail_integral_far(FracOrder alpha, double y) {
  if (y < 2.0) throw InputError("far tail integral needs y >= 2");
  const double a = alpha.value();
  const auto s = detail::tail_series(a);
  const double z = 1.0 / (y * y);
  double coef = 1.0;
  double zn = 1.0;
  double sum = 1.0 / a;
  for (int n = 0; n < 500; ++n) {
    coef *= (s.a + n) * (s.b + n) / ((s.c + n) * (n + 1.0));
    zn *= z;
    const double term = coef * zn / (a + 2.0 * (n + 1));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return s.prefactor * std::pow(y, -a) * sum;
}

/// Velocity profile U(y) = int_{-inf}^y Lambda^alpha Phi_alpha.
///
/// Interior values are exact (integrand 1). For |y| >= 2 the tail integral is a
/// convergent series. On 1 < |y| < 2 the tail is tabulated against
/// w = (|y|-1)^{1-alpha/2}, in which U is smooth up to the edge singularity,
/// and linearly interpolated. Built once, immutable afterwards.
class VelocityProfile {
 public:
  explicit VelocityProfile(FracOrder alpha, std::size_t table_size = 4097) : alpha_(alpha) {
    const double a = alpha.value();
    wexp_ = 1.0 - 0.5 * a;
    table_.resize(table_size);
    auto node = [&](std::size_t i) {
      const double w = static_cast<double>(i) / static_cast<double>(table_size - 1);
      return 1.0 + std::pow(w, 1.0 / wexp_);
    };
    auto h = [&](double s) { return s <= 1.0 ? 0.0 : getoor_fraclap_tail(alpha, s); };
    // Accumulate inward from y = 2; the panel touching y = 1 carries the
    // (y-1)^{-alpha/2} singularity and goes to tanh-sinh.
    table_.back() = getoor_tail_integral_far(alpha, 2.0);
    for (std::size_t i = table_size - 1; i-- > 0;) {
      const double lo = node(i), hi = node(i + 1);
      const double panel = i == 0 ? boost::math::quadrature::tanh_sinh<double>().integrate(h, lo, hi)
                                  : boost::math::quadrature::gauss<double, 15>::integrate(h, lo, hi);
      table_[i] = table_[i + 1] + panel;
    }
    tail_at_one_ = table_.front();
  }

  FracOrder alpha() const { return alpha_; }

  /// int_1^inf H; equals -1 when Lambda^alpha Phi_alpha has zero integral.
  double tail_at_one() const { return tail_at_one_; }

  /// int_y^inf H(s) ds for y >= 1.
  double tail_integral(double y) const {
    if (y >= 2.0) return getoor_tail_integral_far(alpha_, y);
    if (y <= 1.0) return tail_at_one_;
    const double w = std::pow(y - 1.0, wexp_) * static_cast<double>(table_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(w), table_.size() - 2);
    const double f = w - static_cast<double>(i);
    return (1.0 - f) * table_[i] + f * table_[i + 1];
  }

  double operator()(double y) const {
    if (y <= -1.0) return tail_integral(-y);
    if (y < 1.0) return tail_at_one_ + (y + 1.0);
    return tail_at_one_ + 2.0 + (tail_at_one_ - tail_integral(y));
  }

 private:
  FracOrder alpha_;
  double wexp_ = 1.0;
  double tail_at_one_ = 0.0;
  std::vector<double> table_;
};

/// Shared immutable profile per alpha.
inline std::shared_ptr<const VelocityProfile> velocity_profile(FracOrder alpha) {
  static std::mutex mutex;
  static std::vector<std::shared_ptr<const VelocityProfile>> cache;
  std::lock_guard lock(mutex);
  for (const auto& p : cache)
    if (p->alpha().value() == alpha.value()) return p;
  cache.push_back(std::make_shared<const VelocityProfile>(alpha));
  return cache.back();
}

inline double similarity_exponent(FracOrder alpha) { return 1.0 / (alpha.value() + 1.0); }

/// Self-similar time tau = (1+alpha) t. With rho = tau^{-1/(1+alpha)} Phi(x tau^{-1/(1+alpha)})
/// the interior velocity is x/tau * d tau/dt / (1+alpha) = x/((1+alpha) t), which is what
/// the support growth t^{1/(1+alpha)} requires.
inline double selfsimilar_time(FracOrder alpha, double t) { return (1.0 + alpha.value()) * t; }

/// Solution of rho_t + (rho u)_x = 0, u = d/dx^{-1} Lambda^alpha rho, with mass mass(Phi_alpha).
inline double selfsimilar_density(FracOrder alpha, double x, double t) {
  if (!(t > 0.0)) throw InputError("self-similar solution needs t > 0");
  const double s = std::pow(selfsimilar_time(alpha, t), -similarity_exponent(alpha));
  return s * getoor_profile(alpha, x * s);
}

/// u(x,t) = tau^{-alpha/(1+alpha)} U(x tau^{-1/(1+alpha)}).
inline double selfsimilar_velocity(FracOrder alpha, double x, double t) {
  if (!(t > 0.0)) throw InputError("self-similar solution needs t > 0");
  const double tau = selfsimilar_time(alpha, t);
  const double beta = similarity_exponent(alpha);
  return std::pow(tau, -alpha.value() * beta) * (*velocity_profile(alpha))(x * std::pow(tau, -beta));
}

/// Self-similar solution carrying mass M: m * rho_ss(x, m t) with m = M / mass(Phi_alpha).
inline double selfsimilar_density_with_mass(FracOrder alpha, double mass, double x, double t) {
  const double m = mass / getoor_mass(alpha);
  return m * selfsimilar_density(alpha, x, m * t);
}

inline double selfsimilar_velocity_with_mass(FracOrder alpha, double mass, double x, double t) {
  const double m = mass / getoor_mass(alpha);
  return m * selfsimilar_velocity(alpha, x, m * t);
}

/// Time at which the mass-M self-similar solution equals (M/mass(Phi)) Phi(x/w)/w.
inline double selfsimilar_time_of_width(FracOrder alpha, double mass, double width) {
  const double m = mass / getoor_mass(alpha);
  return std::pow(width, 1.0 + alpha.value()) / ((1.0 + alpha.value()) * m);
}

/// Limit profile (rho_bar, G_bar, u_bar) with masses M_rho, M_G.
struct RarefactionTriple {
  RarefactionTriple(double m_rho, double m_g) : M_rho(m_rho), M_G(m_g) {
    if (!(m_rho > 0.0) || !(m_g > 0.0)) throw InputError("rarefaction triple needs positive masses");
  }
  double M_rho;
  double M_G;
};

namespace detail {
inline void require_positive_time(double t) {
  if (!(t > 0.0)) throw InputError("rarefaction profile needs t > 0");
}
}  // namespace detail

inline double rarefaction_velocity(const RarefactionTriple& rt, double x, double t) {
  detail::require_positive_time(t);
  if (x <= 0.0) return 0.0;
  if (x <= rt.M_G * t) return x / t;
  return rt.M_G;
}

inline double rarefaction_G(const RarefactionTriple& rt, double x, double t) {
  detail::require_positive_time(t);
  return (x > 0.0 && x <= rt.M_G * t) ? 1.0 / t : 0.0;
}

inline double rarefaction_density(const RarefactionTriple& rt, double x, double t) {
  return rt.M_rho / rt.M_G * rarefaction_G(rt, x, t);
}

}  // namespace ealign
