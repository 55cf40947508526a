#pragma once

/// Post-processing of trajectories: decay-exponent fits, the one-sided slope
/// (Oleinik) check, comparison-principle violations, weak-form residuals, and
/// the two scaling-limit experiments.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "ealign/closedform.hpp"
#include "ealign/error.hpp"
#include "ealign/grid.hpp"
#include "ealign/solver.hpp"

namespace ealign {

// ---- decay fits -------------------------------------------------------------

enum class DecayReference { sharp, viscosity_bound };

/// Exponent of t in the decay law of ||rho||_p.
inline double reference_decay_slope(DecayReference ref, double p, double alpha) {
  const double sharp = std::isinf(p) ? -1.0 : -1.0 + 1.0 / p;
  return ref == DecayReference::sharp ? sharp : sharp / (2.0 + alpha);
}

struct DecayFit {
  double p = 2.0;
  std::vector<double> times;
  std::vector<double> norms;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double reference_slope = 0.0;
};

/// Least-squares slope of log(norm) against log(t) over the last decade of times.
inline DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& norms, double p,
                          DecayReference ref, double alpha) {
  if (times.size() != norms.size()) throw InputError("decay_fit: times and norms differ in length");
  if (times.size() < 10) throw InputError("decay_fit needs at least 10 samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !(norms[i] > 0.0)) throw InputError("decay_fit needs positive times and norms");
    if (i > 0 && !(times[i] > times[i - 1])) throw InputError("decay_fit needs increasing times");
  }
  if (times.back() < 10.0 * times.front() * (1.0 - 1e-12)) throw InputError("decay_fit needs a decade of times");

  DecayFit fit;
  fit.p = p;
  fit.reference_slope = reference_decay_slope(ref, p, alpha);
  const double t_lo = times.back() / 10.0 * (1.0 - 1e-12);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_lo) {
      fit.times.push_back(times[i]);
      fit.norms.push_back(norms[i]);
    }
  const auto m = static_cast<double>(fit.times.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    sx += std::log(fit.times[i]);
    sy += std::log(fit.norms[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    const double dx = std::log(fit.times[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.norms[i]) - my);
  }
  fit.fitted_slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    const double r = std::log(fit.norms[i]) - my - fit.fitted_slope * (std::log(fit.times[i]) - mx);
    rss += r * r;
  }
  fit.slope_stderr = fit.times.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return fit;
}

/// Norm of each stored state, skipping t = 0.
inline std::pair<std::vector<double>, std::vector<double>> state_norm_series(const Trajectory& traj, double p,
                                                                             bool of_G = false) {
  std::vector<double> ts, ns;
  for (const State& s : traj.states)
    if (s.t() > 0.0) {
      ts.push_back(s.t());
      ns.push_back(lp_norm(of_G ? s.G() : s.rho(), p));
    }
  return {ts, ns};
}

// ---- Oleinik ----------------------------------------------------------------

struct OleinikReport {
  std::vector<double> times;
  /// t * max G
  std::vector<double> t_G_sup;
  /// t * max (u_x)_+ with centered differences
  std::vector<double> t_ux_sup;
  /// max of t * max G over the upper half of the run
  double constant = 0.0;
  /// log-log slope of both series over the upper half; 1 means linear growth
  double growth_slope_G = 0.0;
  double growth_slope_ux = 0.0;
  bool bounded = false;
};

inline double positive_slope_sup(const Field& u) {
  const std::size_t n = u.size();
  const double h = u.grid().spacing();
  double m = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) m = std::max(m, (u[j + 1] - u[j - 1]) / (2.0 * h));
  return m;
}

namespace detail {
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  const double den = static_cast<double>(m) * sxx - sx * sx;
  return den > 0.0 ? (static_cast<double>(m) * sxy - sx * sy) / den : 0.0;
}
}  // namespace detail

/// Builds the report from (t, sup G, sup u_x) samples. Bounded means neither
/// series grows faster than t^{1/2} on the upper half of the time span.
inline OleinikReport oleinik_from_series(const std::vector<double>& times, const std::vector<double>& G_sup,
                                         const std::vector<double>& ux_sup) {
  OleinikReport r;
  std::vector<double> tu, gu, uu;
  const double t_mid = 0.5 * (times.empty() ? 0.0 : times.back());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) continue;
    r.times.push_back(times[i]);
    r.t_G_sup.push_back(times[i] * G_sup[i]);
    r.t_ux_sup.push_back(times[i] * ux_sup[i]);
    if (times[i] >= t_mid) {
      tu.push_back(times[i]);
      gu.push_back(r.t_G_sup.back());
      uu.push_back(r.t_ux_sup.back());
      r.constant = std::max(r.constant, r.t_G_sup.back());
    }
  }
  if (tu.size() < 2) throw InputError("oleinik check needs at least two positive times in the upper half");
  r.growth_slope_G = detail::loglog_slope(tu, gu);
  r.growth_slope_ux = detail::loglog_slope(tu, uu);
  r.bounded = r.growth_slope_G < 0.5 && r.growth_slope_ux < 0.5;
  return r;
}

inline OleinikReport oleinik_check(const Trajectory& traj) {
  std::vector<double> ts, gs, us;
  for (const State& s : traj.states) {
    ts.push_back(s.t());
    gs.push_back(s.G().max());
    us.push_back(positive_slope_sup(s.u()));
  }
  return oleinik_from_series(ts, gs, us);
}

// ---- comparison principle -------------------------------------------------

struct ComparisonReport {
  double min_G = 0.0;
  double min_a_rho_minus_G = 0.0;
  double min_G_minus_b_rho = 0.0;
  /// ||rho0||_inf, the scale used by passes()
  double rho0_sup = 0.0;
  bool passes(double rel_tol) const {
    const double tol = -rel_tol * rho0_sup;
    return min_G >= tol && min_a_rho_minus_G >= tol && min_G_minus_b_rho >= tol;
  }
};

/// Worst violations of 0 <= b rho <= G <= a rho over all stored states and summary rows.
inline ComparisonReport comparison_principle_report(const Trajectory& traj) {
  if (traj.states.empty()) throw InputError("comparison report needs at least one state");
  const double a = traj.sandwich.a, b = traj.sandwich.b;
  ComparisonReport r;
  r.min_G = r.min_a_rho_minus_G = r.min_G_minus_b_rho = std::numeric_limits<double>::infinity();
  r.rho0_sup = traj.states.front().rho().max_abs();
  for (const State& s : traj.states)
    for (std::size_t j = 0; j < s.rho().size(); ++j) {
      r.min_G = std::min(r.min_G, s.G()[j]);
      r.min_a_rho_minus_G = std::min(r.min_a_rho_minus_G, a * s.rho()[j] - s.G()[j]);
      r.min_G_minus_b_rho = std::min(r.min_G_minus_b_rho, s.G()[j] - b * s.rho()[j]);
    }
  for (const SummaryRow& row : traj.summary) {
    r.min_G = std::min(r.min_G, row.min_G);
    r.min_a_rho_minus_G = std::min(r.min_a_rho_minus_G, row.min_a_rho_minus_G);
    r.min_G_minus_b_rho = std::min(r.min_G_minus_b_rho, -row.max_b_rho_minus_G);
  }
  return r;
}

// ---- run-level invariants ---------------------------------------------------

struct RunChecks {
  double mass_drift_rho = 0.0;
  double mass_drift_G = 0.0;
  /// max_t ||u(t)||_inf / ||u0||_inf - 1 (<= 0 when the maximum principle holds)
  double u_max_excess = 0.0;
  /// worst relative increase of ||rho||_p between consecutive steps, p = 2, 4, inf
  double lp_increase = 0.0;
};

inline RunChecks run_checks(const Trajectory& traj) {
  if (traj.summary.empty()) throw InputError("run checks need a summary series");
  RunChecks c;
  const SummaryRow& s0 = traj.summary.front();
  auto drift = [](double m, double m0) { return m0 != 0.0 ? std::abs(m / m0 - 1.0) : std::abs(m); };
  for (std::size_t i = 0; i < traj.summary.size(); ++i) {
    const SummaryRow& r = traj.summary[i];
    c.mass_drift_rho = std::max(c.mass_drift_rho, drift(r.M_rho, s0.M_rho));
    c.mass_drift_G = std::max(c.mass_drift_G, drift(r.M_G, s0.M_G));
    if (s0.u_Linf > 0.0) c.u_max_excess = std::max(c.u_max_excess, r.u_Linf / s0.u_Linf - 1.0);
    if (i > 0) {
      const SummaryRow& q = traj.summary[i - 1];
      for (auto [now, before] : {std::pair{r.rho_L2, q.rho_L2}, {r.rho_L4, q.rho_L4}, {r.rho_Linf, q.rho_Linf}})
        if (before > 0.0) c.lp_increase = std::max(c.lp_increase, now / before - 1.0);
    }
  }
  if (s0.u_Linf == 0.0) c.u_max_excess = 0.0;
  return c;
}

// ---- weak-form residuals ----------------------------------------------------

/// Smooth bump exp(1 - 1/(1-s^2)) on (-1,1) and its first derivative.
inline double smooth_bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }
inline double smooth_bump_derivative(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double d = 1.0 - s * s;
  return smooth_bump(s) * (-2.0 * s / (d * d));
}

/// Separable test function phi(x,t) = bump((x-xc)/ax) bump((t-tc)/at).
struct TestFunction {
  double xc, ax, tc, at;
  double value(double x, double t) const { return smooth_bump((x - xc) / ax) * smooth_bump((t - tc) / at); }
  double dx(double x, double t) const {
    return smooth_bump_derivative((x - xc) / ax) / ax * smooth_bump((t - tc) / at);
  }
  double dt(double x, double t) const {
    return smooth_bump((x - xc) / ax) * smooth_bump_derivative((t - tc) / at) / at;
  }
  double x_lo() const { return xc - ax; }
  double x_hi() const { return xc + ax; }
  double t_lo() const { return tc - at; }
  double t_hi() const { return tc + at; }
};

namespace detail {

/// int over [lo, hi] of f, split at the given breakpoints, adaptive Gauss-Kronrod per piece.
template <class F>
double piecewise_integral(F&& f, double lo, double hi, std::vector<double> cuts) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
    if (b > a) sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
  }
  return sum;
}

}  // namespace detail

/// int int u phi_t + (u^2/2) phi_x dx dt + int u(x,0) phi(x,0) dx for the rarefaction velocity,
/// with t >= 0 and the kinks of the integrand handled exactly.
inline double burgers_weak_residual(const RarefactionTriple& rt, const TestFunction& phi) {
  const double t_hi = phi.t_hi();
  if (t_hi <= 0.0) return 0.0;
  const double t_lo = std::max(0.0, phi.t_lo());
  auto inner = [&](double t) {
    auto f = [&](double x) {
      const double u = rarefaction_velocity(rt, x, t);
      return u * phi.dt(x, t) + 0.5 * u * u * phi.dx(x, t);
    };
    return detail::piecewise_integral(f, phi.x_lo(), phi.x_hi(), {0.0, rt.M_G * t});
  };
  const double bulk = detail::piecewise_integral(inner, t_lo, t_hi, {});
  // u(x,0) is the step M_G * 1_{x>0}
  double initial = 0.0;
  if (phi.t_lo() < 0.0) {
    auto f0 = [&](double x) { return x > 0.0 ? rt.M_G * phi.value(x, 0.0) : 0.0; };
    initial = detail::piecewise_integral(f0, phi.x_lo(), phi.x_hi(), {0.0});
  }
  return bulk + initial;
}

/// int int rho phi_t + rho u phi_x dx dt for the self-similar pair, phi supported in t > 0.
/// The density has a (edge - |x|)^{alpha/2} root at the support edge; x = edge sin(theta)
/// makes the integrand C^1 there.
inline double selfsimilar_continuity_residual(FracOrder alpha, const TestFunction& phi) {
  if (!(phi.t_lo() > 0.0)) throw InputError("continuity residual needs a test function supported in t > 0");
  const double beta = similarity_exponent(alpha);
  auto inner = [&](double t) {
    const double edge = std::pow(selfsimilar_time(alpha, t), beta);
    const double lo = std::max(phi.x_lo(), -edge), hi = std::min(phi.x_hi(), edge);
    if (!(hi > lo)) return 0.0;
    auto f = [&](double th) {
      const double x = edge * std::sin(th);
      const double r = selfsimilar_density(alpha, x, t);
      if (r == 0.0) return 0.0;
      return (r * phi.dt(x, t) + r * selfsimilar_velocity(alpha, x, t) * phi.dx(x, t)) * edge * std::cos(th);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, std::asin(lo / edge), std::asin(hi / edge),
                                                                         10, 1e-11);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inner, phi.t_lo(), phi.t_hi(), 8, 1e-10);
}

// ---- scaling experiments ------------------------------------------------------

enum class ScalingMode { rarefaction, barenblatt };

inline const char* to_string(ScalingMode m) { return m == ScalingMode::rarefaction ? "rarefaction" : "barenblatt"; }

struct ScalingParams {
  std::vector<double> lambdas{1.0, 2.0, 4.0, 8.0};
  double q = 2.0;
  double R = 3.0;
  double t1 = 1.0;
  double t2 = 2.0;
  std::size_t time_samples = 5;
  std::size_t mesh_points = 4001;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct ScalingReport {
  ScalingMode mode = ScalingMode::rarefaction;
  double q = 2.0, R = 0.0, t1 = 0.0, t2 = 0.0;
  std::vector<double> lambdas;
  /// rarefaction: sup_t ||u^lambda - u_bar||_{L^q[-R,R]}; barenblatt: L^1 distance at t = 1
  std::vector<double> distances;
  /// rarefaction only: same with 0.02 R neighbourhoods of the fan edges removed
  std::vector<double> distances_excluding_kinks;
  /// rarefaction only: time-averaged L^q distances of mollified rho^lambda, G^lambda
  std::vector<double> rho_distances, rho_distances_excluding_kinks;
  std::vector<double> G_distances, G_distances_excluding_kinks;
  /// barenblatt only: the comparator is S_M(x, 1 + t0 lambda^{-(1+alpha)})
  double time_offset = 0.0;
};

/// Physical-space fields at one physical time.
struct Snapshot {
  double t = 0.0;
  std::function<double(double)> rho, G, u;
};

inline Snapshot snapshot_of(const State& s) {
  // Fields are captured by value so the snapshot outlives the trajectory.
  return {s.t(), [f = s.rho()](double x) { return interpolate_linear(f, x); },
          [f = s.G()](double x) { return interpolate_linear(f, x); },
          [f = s.u()](double x) { return interpolate_linear(f, x); }};
}

struct RarefactionDistances {
  double u = 0.0, u_excl = 0.0;
  double rho = 0.0, rho_excl = 0.0;
  double G = 0.0, G_excl = 0.0;
};

namespace detail {

struct MeasureMesh {
  std::vector<double> x;
  double dx = 0.0;
};

inline MeasureMesh measure_mesh(double lo, double hi, std::size_t points) {
  MeasureMesh m;
  m.dx = (hi - lo) / static_cast<double>(points - 1);
  m.x.resize(points);
  for (std::size_t i = 0; i < points; ++i) m.x[i] = lo + m.dx * static_cast<double>(i);
  return m;
}

/// Trapezoid L^q norm of v on the mesh, restricted to samples with keep[i].
inline double lq_on_mesh(const std::vector<double>& v, const MeasureMesh& m, double q, const std::vector<char>& keep) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!keep[i]) continue;
    const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    s += w * std::pow(std::abs(v[i]), q);
  }
  return std::pow(s * m.dx, 1.0 / q);
}

/// Convolution with the normalized smooth bump of half width `width`, evaluated on `out`
/// from samples of f on the wider mesh `in` (same spacing, offset by the kernel half width).
inline std::vector<double> mollify(const std::vector<double>& f_in, std::size_t out_size, double dx, double width) {
  const auto half = static_cast<std::size_t>(std::ceil(width / dx));
  std::vector<double> kernel(2 * half + 1);
  double ks = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const double s = (static_cast<double>(i) - static_cast<double>(half)) * dx / width;
    kernel[i] = smooth_bump(s);
    ks += kernel[i];
  }
  for (double& k : kernel) k /= ks;
  std::vector<double> out(out_size, 0.0);
  for (std::size_t i = 0; i < out_size; ++i)
    for (std::size_t k = 0; k < kernel.size(); ++k) out[i] += kernel[k] * f_in[i + k];
  return out;
}

}  // namespace detail

/// Distances of the rescaled snapshot (taken at physical time lambda * t) to the
/// rarefaction triple at time t, on [-R, R].
inline RarefactionDistances rarefaction_snapshot_distance(const Snapshot& phys, double lambda,
                                                          const RarefactionTriple& rt, const ScalingParams& p) {
  const double t = phys.t / lambda;
  const double width = 0.05 * p.R;
  const auto mesh = detail::measure_mesh(-p.R, p.R, p.mesh_points);
  const auto half = static_cast<std::size_t>(std::ceil(width / mesh.dx));
  const auto wide = detail::measure_mesh(-p.R - static_cast<double>(half) * mesh.dx,
                                         p.R + static_cast<double>(half) * mesh.dx, p.mesh_points + 2 * half);

  std::vector<char> all(mesh.x.size(), 1), excl(mesh.x.size(), 1);
  const double kink_zone = 0.02 * p.R;
  for (std::size_t i = 0; i < mesh.x.size(); ++i)
    excl[i] = std::abs(mesh.x[i]) > kink_zone && std::abs(mesh.x[i] - rt.M_G * t) > kink_zone;

  std::vector<double> du(mesh.x.size());
  for (std::size_t i = 0; i < mesh.x.size(); ++i)
    du[i] = phys.u(lambda * mesh.x[i]) - rarefaction_velocity(rt, mesh.x[i], t);

  auto density_diff = [&](const std::function<double(double)>& f, auto&& exact) {
    std::vector<double> a(wide.x.size()), b(wide.x.size());
    for (std::size_t i = 0; i < wide.x.size(); ++i) {
      a[i] = lambda * f(lambda * wide.x[i]);
      b[i] = exact(wide.x[i]);
    }
    const auto ma = detail::mollify(a, mesh.x.size(), mesh.dx, width);
    const auto mb = detail::mollify(b, mesh.x.size(), mesh.dx, width);
    std::vector<double> d(mesh.x.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = ma[i] - mb[i];
    return d;
  };
  const auto drho = density_diff(phys.rho, [&](double x) { return rarefaction_density(rt, x, t); });
  const auto dG = density_diff(phys.G, [&](double x) { return rarefaction_G(rt, x, t); });

  RarefactionDistances d;
  d.u = detail::lq_on_mesh(du, mesh, p.q, all);
  d.u_excl = detail::lq_on_mesh(du, mesh, p.q, excl);
  d.rho = detail::lq_on_mesh(drho, mesh, p.q, all);
  d.rho_excl = detail::lq_on_mesh(drho, mesh, p.q, excl);
  d.G = detail::lq_on_mesh(dG, mesh, p.q, all);
  d.G_excl = detail::lq_on_mesh(dG, mesh, p.q, excl);
  return d;
}

/// Sup over snapshots for u, average over snapshots for the mollified densities.
inline RarefactionDistances rarefaction_distance(const std::vector<Snapshot>& snaps, double lambda,
                                                 const RarefactionTriple& rt, const ScalingParams& p) {
  if (snaps.empty()) throw InputError("rarefaction distance needs snapshots");
  RarefactionDistances acc;
  for (const Snapshot& s : snaps) {
    const auto d = rarefaction_snapshot_distance(s, lambda, rt, p);
    acc.u = std::max(acc.u, d.u);
    acc.u_excl = std::max(acc.u_excl, d.u_excl);
    acc.rho += d.rho;
    acc.rho_excl += d.rho_excl;
    acc.G += d.G;
    acc.G_excl += d.G_excl;
  }
  const auto n = static_cast<double>(snaps.size());
  acc.rho /= n;
  acc.rho_excl /= n;
  acc.G /= n;
  acc.G_excl /= n;
  return acc;
}

namespace detail {

/// Runs body(i) for i in [0, count) on a pool of `jobs` threads; rethrows the first failure.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

inline void validate_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw InputError("scaling experiment needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 1.0)) throw InputError("scaling factors must be >= 1");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw InputError("scaling factors must increase");
  }
}

/// Config for the physical run behind scaling factor lambda: the box grows with
/// lambda at fixed n, viscosity as given.
inline SolverConfig scaled_config(const SolverConfig& base, double lambda, double epsilon, double t_end,
                                  std::vector<double> outputs) {
  SolverConfig c = base;
  c.half_width = base.half_width * lambda;
  c.epsilon = epsilon;
  c.t_end = t_end;
  c.output_times = std::move(outputs);
  return c;
}

}  // namespace detail

/// Rarefaction scaling limit. Physical runs for factor lambda live on a box
/// lambda times wider at fixed n, with eps = lambda * eps_base, so that the
/// rescaled problems share one resolution and one viscosity.
inline ScalingReport scaling_limit_experiment(const SolverConfig& base, const ScalingParams& p) {
  base.validate();
  detail::validate_lambdas(p.lambdas);
  if (base.initial.mode != InitialMode::proportional)
    throw InputError("rarefaction scaling experiment needs proportional initial data");
  if (!(p.q >= 1.0) || !(p.R > 0.0) || !(p.t1 > 0.0) || !(p.t2 >= p.t1) || p.time_samples < 1)
    throw InputError("bad scaling parameters");

  const Grid1D grid = base.grid();
  const FracOrder alpha(base.alpha);
  double M_G = 0.0;
  {
    SpectralWorkspace ws(grid);
    M_G = integrate(make_initial_state(base.initial, grid, alpha, ws).state.G());
  }
  if (!(M_G > 1e-12)) throw InputError("rarefaction limit needs M_G > 0");
  double M_rho = 0.0;
  {
    SpectralWorkspace ws(grid);
    M_rho = integrate(make_initial_state(base.initial, grid, alpha, ws).state.rho());
  }
  const RarefactionTriple rt(M_rho, M_G);
  const double eps_base = base.viscosity();

  std::vector<double> sample_times;
  for (std::size_t k = 0; k < p.time_samples; ++k)
    sample_times.push_back(p.time_samples == 1 ? p.t2
                                               : p.t1 + (p.t2 - p.t1) * static_cast<double>(k) /
                                                            static_cast<double>(p.time_samples - 1));

  ScalingReport rep;
  rep.mode = ScalingMode::rarefaction;
  rep.q = p.q;
  rep.R = p.R;
  rep.t1 = p.t1;
  rep.t2 = p.t2;
  rep.lambdas = p.lambdas;
  std::vector<RarefactionDistances> out(p.lambdas.size());
  detail::parallel_for(p.lambdas.size(), p.jobs, [&](std::size_t i) {
    const double lam = p.lambdas[i];
    std::vector<double> outputs;
    for (double t : sample_times) outputs.push_back(lam * t);
    const Trajectory traj = run(detail::scaled_config(base, lam, lam * eps_base, lam * p.t2, outputs));
    std::vector<Snapshot> snaps;
    for (const State& s : traj.states)
      if (s.t() > 0.0) snaps.push_back(snapshot_of(s));
    out[i] = rarefaction_distance(snaps, lam, rt, p);
  });
  for (const auto& d : out) {
    rep.distances.push_back(d.u);
    rep.distances_excluding_kinks.push_back(d.u_excl);
    rep.rho_distances.push_back(d.rho);
    rep.rho_distances_excluding_kinks.push_back(d.rho_excl);
    rep.G_distances.push_back(d.G);
    rep.G_distances_excluding_kinks.push_back(d.G_excl);
  }
  return rep;
}

/// Self-similar time of the initial data: rho0 = S_M(x, t0) when rho0 is a
/// centred Getoor profile, else 0.
inline double barenblatt_time_offset(const InitialDataSpec& spec, FracOrder alpha, double mass) {
  if (spec.rho0.kind != ShapeSpec::Kind::getoor || spec.rho0.center != 0.0) return 0.0;
  return selfsimilar_time_of_width(alpha, mass, spec.rho0.width);
}

/// L^1 distance on the physical grid of lambda rho(lambda x, lambda^{1+alpha}) to S_M(x, 1 + t0 lambda^{-(1+alpha)}).
inline double barenblatt_snapshot_distance(const Field& rho_phys, double lambda, FracOrder alpha, double mass,
                                           double time_offset, std::size_t mesh_points = 8001) {
  const double a = alpha.value();
  const double s = 1.0 + time_offset * std::pow(lambda, -(1.0 + a));
  const double reach = std::pow(selfsimilar_time(alpha, mass / getoor_mass(alpha) * s), similarity_exponent(alpha));
  const double X = std::max(rho_phys.grid().half_width() / lambda, reach);
  const auto mesh = detail::measure_mesh(-X, X, mesh_points);
  std::vector<double> d(mesh.x.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = lambda * interpolate_linear(rho_phys, lambda * mesh.x[i]) -
           selfsimilar_density_with_mass(alpha, mass, mesh.x[i], s);
  const std::vector<char> all(d.size(), 1);
  return detail::lq_on_mesh(d, mesh, 1.0, all);
}

/// Barenblatt scaling limit of the G = 0 problem. Input is rescaled to unit mass.
/// Physical runs for factor lambda use a box lambda times wider at fixed n and
/// eps = eps_base * lambda^{1-alpha}, which keeps the rescaled viscosity fixed.
inline ScalingReport barenblatt_limit_experiment(SolverConfig base, const std::vector<double>& lambdas,
                                                 unsigned jobs = 0) {
  if (base.initial.mode != InitialMode::zero_G) throw InputError("Barenblatt experiment needs G0 = 0");
  base.initial.rho0.mass = 1.0;
  base.validate();
  detail::validate_lambdas(lambdas);
  const FracOrder alpha(base.alpha);
  const double a = alpha.value();
  const double t0 = barenblatt_time_offset(base.initial, alpha, 1.0);
  const double eps_base = base.viscosity();

  ScalingReport rep;
  rep.mode = ScalingMode::barenblatt;
  rep.q = 1.0;
  rep.t1 = rep.t2 = 1.0;
  rep.R = base.half_width;
  rep.lambdas = lambdas;
  rep.time_offset = t0;
  rep.distances.resize(lambdas.size());
  detail::parallel_for(lambdas.size(), jobs, [&](std::size_t i) {
    const double lam = lambdas[i];
    const double t_phys = std::pow(lam, 1.0 + a);
    const Trajectory traj =
        run(detail::scaled_config(base, lam, eps_base * std::pow(lam, 1.0 - a), t_phys, {t_phys}));
    rep.distances[i] = barenblatt_snapshot_distance(traj.states.back().rho(), lam, alpha, 1.0, t0);
  });
  return rep;
}

/// v[i] < v[i-1] for every i.
inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace ealign
