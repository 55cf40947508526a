#pragma once

/// Time integration of the viscous three-field system
///   rho_t + (rho u)_x = eps rho_xx,  G_t + (G u)_x = eps G_xx,
///   u = d/dx^{-1}(G + Lambda^alpha rho)
/// on a truncated periodic grid.
///
/// One step is a Strang splitting: exact diffusion half steps through an
/// integrating factor in Fourier space around an SSP-RK2 transport step, with u
/// recomputed from (rho, G) at every stage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ealign/closedform.hpp"
#include "ealign/error.hpp"
#include "ealign/fracops.hpp"
#include "ealign/grid.hpp"

namespace ealign {

enum class FluxScheme { spectral, upwind };

inline const char* to_string(FluxScheme s) { return s == FluxScheme::spectral ? "spectral" : "upwind"; }

/// Named analytic density shape, or samples read from a CSV file.
struct ShapeSpec {
  enum class Kind { gaussian, bump, getoor, csv };
  Kind kind = Kind::gaussian;
  double center = 0.0;
  /// gaussian: standard deviation; bump and getoor: support radius
  double width = 1.0;
  /// When set, the sampled field is rescaled to this discrete mass.
  std::optional<double> mass;
  std::string csv_path;
};

inline const char* to_string(ShapeSpec::Kind k) {
  switch (k) {
    case ShapeSpec::Kind::gaussian: return "gaussian";
    case ShapeSpec::Kind::bump: return "bump";
    case ShapeSpec::Kind::getoor: return "getoor";
    case ShapeSpec::Kind::csv: return "csv";
  }
  return "?";
}

enum class InitialMode { proportional, independent, zero_G };

inline const char* to_string(InitialMode m) {
  switch (m) {
    case InitialMode::proportional: return "proportional";
    case InitialMode::independent: return "independent";
    case InitialMode::zero_G: return "zero_G";
  }
  return "?";
}

struct InitialDataSpec {
  ShapeSpec rho0;
  InitialMode mode = InitialMode::proportional;
  /// proportional mode: G0 = coef * rho0 with b_coef <= coef <= a_coef
  double coef = 1.0;
  double a_coef = 1.0;
  double b_coef = 1.0;
  /// independent mode
  ShapeSpec G0;
};

struct SolverConfig {
  double alpha = 0.5;
  /// Viscosity; unset means one grid unit, eps = h.
  std::optional<double> epsilon;
  std::size_t n = 4096;
  double half_width = 16.0;
  double t_end = 1.0;
  double cfl = 0.4;
  FluxScheme flux_scheme = FluxScheme::upwind;
  std::vector<double> output_times;
  InitialDataSpec initial;

  Grid1D grid() const { return Grid1D(n, half_width); }
  double viscosity() const { return epsilon.value_or(grid().spacing()); }

  void validate() const {
    FracOrder{alpha};
    (void)grid();
    if (epsilon && !(*epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be finite and >= 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InputError("cfl must lie in (0,1]");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
      if (output_times[i] < 0.0 || output_times[i] > t_end) throw InputError("output time outside [0, t_end]");
      if (i > 0 && !(output_times[i] > output_times[i - 1])) throw InputError("output times must increase");
    }
    if (initial.mode == InitialMode::proportional &&
        !(initial.b_coef >= 0.0 && initial.b_coef <= initial.coef && initial.coef <= initial.a_coef))
      throw InputError("proportional data needs 0 <= b <= coef <= a");
  }
};

/// (rho, G, t) with the velocity derived from them.
class State {
 public:
  State(Field rho, Field G, double t, FracOrder alpha, SpectralWorkspace& ws)
      : rho_(std::move(rho)), G_(std::move(G)), u_(velocity_from_state(rho_, G_, alpha, ws)), t_(t) {}

  const Field& rho() const { return rho_; }
  const Field& G() const { return G_; }
  const Field& u() const { return u_; }
  double t() const { return t_; }

 private:
  Field rho_;
  Field G_;
  Field u_;
  double t_;
};

/// Which sandwich b rho0 <= G0 <= a rho0 the initial data satisfy.
struct SandwichFlags {
  bool holds = true;
  double a = 0.0;
  double b = 0.0;
};

struct InitialState {
  State state;
  SandwichFlags sandwich;
};

// ---- initial data ---------------------------------------------------------

inline Field sample_shape(const ShapeSpec& s, const Grid1D& grid, FracOrder alpha) {
  Field f(grid);
  switch (s.kind) {
    case ShapeSpec::Kind::gaussian: {
      if (!(s.width > 0.0)) throw InputError("gaussian width must be positive");
      const double norm = 1.0 / (s.width * std::sqrt(2.0 * std::numbers::pi));
      f = Field::sample(grid, [&](double x) {
        const double z = (x - s.center) / s.width;
        return norm * std::exp(-0.5 * z * z);
      });
      break;
    }
    case ShapeSpec::Kind::bump:
      if (!(s.width > 0.0)) throw InputError("bump width must be positive");
      f = Field::sample(grid, [&](double x) {
        const double z = (x - s.center) / s.width;
        return std::abs(z) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0;
      });
      break;
    case ShapeSpec::Kind::getoor:
      if (!(s.width > 0.0)) throw InputError("getoor width must be positive");
      f = Field::sample(grid, [&](double x) { return getoor_profile(alpha, (x - s.center) / s.width) / s.width; });
      break;
    case ShapeSpec::Kind::csv: {
      const Field src = read_field_csv(s.csv_path);
      f = Field::sample(grid, [&](double x) { return interpolate_linear(src, x); });
      break;
    }
  }
  if (s.mass) {
    const double m = integrate(f);
    if (m <= 0.0) throw InputError("cannot rescale a shape with nonpositive mass");
    f *= *s.mass / m;
  }
  return f;
}

/// Indices [first, last] where |f| exceeds rel * max|f|; nullopt for f == 0.
inline std::optional<std::pair<double, double>> support_extent(const Field& f, double rel = 1e-9) {
  const double m = f.max_abs();
  if (m == 0.0) return std::nullopt;
  std::size_t lo = f.size(), hi = 0;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (std::abs(f[j]) > rel * m) {
      lo = std::min(lo, j);
      hi = j;
    }
  return std::make_pair(f.grid().x(lo), f.grid().x(hi));
}

inline InitialState make_initial_state(const InitialDataSpec& spec, const Grid1D& grid, FracOrder alpha,
                                       SpectralWorkspace& ws) {
  Field rho0 = sample_shape(spec.rho0, grid, alpha);
  if (rho0.min() < 0.0) throw InputError("initial density has negative samples");
  const double L = grid.half_width();
  auto check_support = [&](const Field& f, const char* name) {
    if (auto ext = support_extent(f); ext && (ext->first < -0.5 * L || ext->second > 0.5 * L))
      throw InputError(std::string(name) + " support leaves [-L/2, L/2]");
  };
  check_support(rho0, "rho0");

  SandwichFlags flags;
  Field G0(grid);
  switch (spec.mode) {
    case InitialMode::proportional:
      G0 = spec.coef * rho0;
      flags = {spec.b_coef <= spec.coef && spec.coef <= spec.a_coef, spec.a_coef, spec.b_coef};
      break;
    case InitialMode::zero_G:
      flags = {true, 0.0, 0.0};
      break;
    case InitialMode::independent: {
      G0 = sample_shape(spec.G0, grid, alpha);
      if (G0.min() < 0.0) throw InputError("initial G has negative samples");
      check_support(G0, "G0");
      if (rho0.max_abs() == 0.0 && G0.max_abs() > 0.0)
        throw InputError("G0 must vanish where rho0 does");
      double a = 0.0, b = std::numeric_limits<double>::infinity();
      bool holds = true;
      const double tiny = 1e-12 * rho0.max_abs();
      for (std::size_t j = 0; j < grid.size(); ++j) {
        if (rho0[j] > tiny) {
          a = std::max(a, G0[j] / rho0[j]);
          b = std::min(b, G0[j] / rho0[j]);
        } else if (G0[j] > tiny) {
          holds = false;
        }
      }
      flags = {holds, a, std::isfinite(b) ? b : 0.0};
      break;
    }
  }
  return {State(std::move(rho0), std::move(G0), 0.0, alpha, ws), flags};
}

// ---- one step ---------------------------------------------------------------

namespace detail {

/// -(f u)_x with the chosen discretization.
inline std::vector<double> transport_rhs(const Field& f, const Field& u, FluxScheme scheme, SpectralWorkspace& ws) {
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  std::vector<double> out(n);
  if (scheme == FluxScheme::upwind) {
    std::vector<double> flux(n);  // flux[j] at face j+1/2
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jp = (j + 1) % n;
      const double uf = 0.5 * (u[j] + u[jp]);
      flux[j] = uf > 0.0 ? uf * f[j] : uf * f[jp];
    }
    for (std::size_t j = 0; j < n; ++j) out[j] = -(flux[j] - flux[(j + n - 1) % n]) / h;
    return out;
  }
  std::vector<double> prod(n);
  for (std::size_t j = 0; j < n; ++j) prod[j] = f[j] * u[j];
  const Grid1D& g = f.grid();
  const std::size_t cutoff = n / 3;  // 2/3 rule
  const Field d = ws.apply(Field(g, std::move(prod)), [&](std::size_t k) {
    return k < cutoff ? std::complex<double>(0.0, g.rfft_wavenumber(k)) : std::complex<double>(0.0);
  });
  for (std::size_t j = 0; j < n; ++j) out[j] = -d[j];
  return out;
}

inline Field diffuse(const Field& f, double eps, double tau, FluxScheme scheme, SpectralWorkspace& ws) {
  if (eps == 0.0 || tau == 0.0) return f;
  const Grid1D& g = f.grid();
  const double h = g.spacing();
  return ws.apply(f, [&](std::size_t k) {
    const double xi = g.rfft_wavenumber(k);
    // The upwind scheme uses the three-point Laplacian symbol, whose semigroup is positive.
    const double symbol = scheme == FluxScheme::spectral ? xi * xi : 4.0 / (h * h) * std::pow(std::sin(0.5 * xi * h), 2);
    return std::complex<double>(std::exp(-eps * symbol * tau), 0.0);
  });
}

inline Field axpy_field(const Field& y, double a, const std::vector<double>& x) {
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] + a * x[j];
  return Field(y.grid(), std::move(out));
}

inline double max_stable_dt(const State& s, double cfl) {
  return cfl * s.rho().grid().spacing() / std::max(s.u().max_abs(), 1e-12);
}

}  // namespace detail

inline State step(const State& state, double dt, const SolverConfig& cfg, SpectralWorkspace& ws) {
  const FracOrder alpha(cfg.alpha);
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  if (dt > detail::max_stable_dt(state, cfg.cfl) * (1.0 + 1e-12))
    throw RuntimeAbort("CFL violation: dt = " + format_real(dt) + " exceeds " +
                       format_real(detail::max_stable_dt(state, cfg.cfl)));
  const double eps = cfg.viscosity();
  const FluxScheme scheme = cfg.flux_scheme;
  try {
    Field rho = detail::diffuse(state.rho(), eps, 0.5 * dt, scheme, ws);
    Field G = detail::diffuse(state.G(), eps, 0.5 * dt, scheme, ws);
    const Field u0 = velocity_from_state(rho, G, alpha, ws);

    const Field rho1 = detail::axpy_field(rho, dt, detail::transport_rhs(rho, u0, scheme, ws));
    const Field G1 = detail::axpy_field(G, dt, detail::transport_rhs(G, u0, scheme, ws));
    const Field u1 = velocity_from_state(rho1, G1, alpha, ws);
    Field rho2 = 0.5 * (rho + detail::axpy_field(rho1, dt, detail::transport_rhs(rho1, u1, scheme, ws)));
    Field G2 = 0.5 * (G + detail::axpy_field(G1, dt, detail::transport_rhs(G1, u1, scheme, ws)));

    rho = detail::diffuse(rho2, eps, 0.5 * dt, scheme, ws);
    G = detail::diffuse(G2, eps, 0.5 * dt, scheme, ws);
    return State(std::move(rho), std::move(G), state.t() + dt, alpha, ws);
  } catch (const RuntimeAbort& e) {
    throw RuntimeAbort("step at t = " + format_real(state.t()) + " produced " + e.what());
  }
}

// ---- runs -----------------------------------------------------------------

struct SummaryRow {
  double t = 0.0;
  double M_rho = 0.0, M_G = 0.0;
  double rho_L1 = 0.0, rho_L2 = 0.0, rho_L4 = 0.0, rho_Linf = 0.0;
  double G_L1 = 0.0, G_L2 = 0.0, G_L4 = 0.0, G_Linf = 0.0;
  double u_Linf = 0.0;
  double min_rho = 0.0, min_G = 0.0;
  /// min(a rho - G) and max(b rho - G) over space
  double min_a_rho_minus_G = 0.0, max_b_rho_minus_G = 0.0;
};

inline SummaryRow summarize(const State& s, const SandwichFlags& sw) {
  SummaryRow r;
  r.t = s.t();
  r.M_rho = integrate(s.rho());
  r.M_G = integrate(s.G());
  r.rho_L1 = lp_norm(s.rho(), 1.0);
  r.rho_L2 = lp_norm(s.rho(), 2.0);
  r.rho_L4 = lp_norm(s.rho(), 4.0);
  r.rho_Linf = lp_norm(s.rho(), kInfNorm);
  r.G_L1 = lp_norm(s.G(), 1.0);
  r.G_L2 = lp_norm(s.G(), 2.0);
  r.G_L4 = lp_norm(s.G(), 4.0);
  r.G_Linf = lp_norm(s.G(), kInfNorm);
  r.u_Linf = s.u().max_abs();
  r.min_rho = s.rho().min();
  r.min_G = s.G().min();
  r.min_a_rho_minus_G = std::numeric_limits<double>::infinity();
  r.max_b_rho_minus_G = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.rho().size(); ++j) {
    r.min_a_rho_minus_G = std::min(r.min_a_rho_minus_G, sw.a * s.rho()[j] - s.G()[j]);
    r.max_b_rho_minus_G = std::max(r.max_b_rho_minus_G, sw.b * s.rho()[j] - s.G()[j]);
  }
  return r;
}

struct Trajectory {
  SolverConfig config;
  SandwichFlags sandwich;
  std::vector<State> states;  // initial state, then one per positive output time
  std::vector<SummaryRow> summary;
  std::size_t steps = 0;
};

/// Fails when rho or G reaches within L/4 of the box edge.
inline void check_boundary_margin(const State& s) {
  const double L = s.rho().grid().half_width();
  for (const Field* f : {&s.rho(), &s.G()})
    if (auto ext = support_extent(*f); ext && (ext->first < -0.75 * L || ext->second > 0.75 * L))
      throw RuntimeAbort("solution support reached the boundary margin L - L/4 at t = " + format_real(s.t()) +
                         " (extent [" + format_real(ext->first) + ", " + format_real(ext->second) +
                         "]); enlarge half_width");
}

inline Trajectory run(const SolverConfig& cfg) {
  cfg.validate();
  const Grid1D grid = cfg.grid();
  const FracOrder alpha(cfg.alpha);
  SpectralWorkspace ws(grid);
  InitialState init = make_initial_state(cfg.initial, grid, alpha, ws);

  Trajectory traj;
  traj.config = cfg;
  traj.sandwich = init.sandwich;
  State state = std::move(init.state);
  traj.states.push_back(state);
  traj.summary.push_back(summarize(state, traj.sandwich));

  std::vector<double> stops;
  for (double t : cfg.output_times)
    if (t > 0.0) stops.push_back(t);
  if (cfg.t_end > 0.0 && (stops.empty() || stops.back() < cfg.t_end)) stops.push_back(cfg.t_end);
  const bool t_end_is_output =
      std::find(cfg.output_times.begin(), cfg.output_times.end(), cfg.t_end) != cfg.output_times.end() ||
      cfg.output_times.empty();

  for (std::size_t i = 0; i < stops.size(); ++i) {
    const double target = stops[i];
    while (state.t() < target) {
      double dt = detail::max_stable_dt(state, cfg.cfl);
      const double remaining = target - state.t();
      if (dt >= remaining * (1.0 - 1e-12)) dt = remaining;
      state = step(state, dt, cfg, ws);
      if (target - state.t() < 1e-12 * std::max(1.0, target)) state = State(state.rho(), state.G(), target, alpha, ws);
      ++traj.steps;
      check_boundary_margin(state);
      traj.summary.push_back(summarize(state, traj.sandwich));
    }
    const bool is_last = i + 1 == stops.size();
    if (!is_last || t_end_is_output) traj.states.push_back(state);
  }
  return traj;
}

}  // namespace ealign
