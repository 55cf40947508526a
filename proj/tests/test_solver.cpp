#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ealign/closedform.hpp"
#include "ealign/solver.hpp"

using namespace ealign;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SolverConfig gaussian_config(FluxScheme scheme, std::size_t n = 1024, double L = 8.0) {
  SolverConfig c;
  c.alpha = 0.5;
  c.n = n;
  c.half_width = L;
  c.flux_scheme = scheme;
  c.initial.rho0 = {ShapeSpec::Kind::gaussian, -1.0, 0.4, 1.0, ""};
  c.initial.mode = InitialMode::proportional;
  c.initial.coef = c.initial.a_coef = c.initial.b_coef = 1.0;
  return c;
}

// Advances with a fixed step; the last step is shortened to land on t_end.
State advance(const SolverConfig& cfg, double dt, double t_end) {
  const Grid1D g = cfg.grid();
  SpectralWorkspace ws(g);
  State s = make_initial_state(cfg.initial, g, FracOrder(cfg.alpha), ws).state;
  while (s.t() < t_end - 1e-14) s = step(s, std::min(dt, t_end - s.t()), cfg, ws);
  return s;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
  SolverConfig cfg = gaussian_config(FluxScheme::spectral, 256);
  const Grid1D g = cfg.grid();
  SpectralWorkspace ws(g);
  const State zero{Field{g}, Field{g}, 0.0, FracOrder(0.5), ws};
  for (FluxScheme scheme : {FluxScheme::spectral, FluxScheme::upwind}) {
    cfg.flux_scheme = scheme;
    const State next = step(zero, 0.01, cfg, ws);
    CHECK(next.rho().max_abs() == 0.0);
    CHECK(next.G().max_abs() == 0.0);
    CHECK(next.u().max_abs() == 0.0);
    CHECK_THAT(next.t(), WithinAbs(0.01, 1e-15));
  }
}

TEST_CASE("initial data construction") {
  const Grid1D g(1024, 8.0);
  SpectralWorkspace ws(g);
  const FracOrder alpha(0.5);
  SolverConfig cfg = gaussian_config(FluxScheme::upwind);
  const InitialState init = make_initial_state(cfg.initial, g, alpha, ws);
  CHECK_THAT(integrate(init.state.rho()), WithinRel(1.0, 1e-13));
  CHECK((init.state.G() - init.state.rho()).max_abs() == 0.0);
  CHECK(init.sandwich.holds);
  CHECK(init.sandwich.a == 1.0);
  CHECK(init.sandwich.b == 1.0);

  InitialDataSpec zero = cfg.initial;
  zero.mode = InitialMode::zero_G;
  CHECK(make_initial_state(zero, g, alpha, ws).state.G().max_abs() == 0.0);

  InitialDataSpec ind = cfg.initial;
  ind.mode = InitialMode::independent;
  ind.G0 = {ShapeSpec::Kind::gaussian, -1.0, 0.4, 3.0, ""};
  const InitialState three = make_initial_state(ind, g, alpha, ws);
  CHECK_THAT(three.sandwich.a, WithinRel(3.0, 1e-12));
  CHECK_THAT(three.sandwich.b, WithinRel(3.0, 1e-12));

  ind.G0 = {ShapeSpec::Kind::gaussian, 1.0, 0.4, 1.0, ""};
  CHECK_FALSE(make_initial_state(ind, g, alpha, ws).sandwich.holds);
}

TEST_CASE("initial velocity of the Getoor profile with G = 0 is U") {
  const Grid1D g(8192, 8.0);
  SpectralWorkspace ws(g);
  const FracOrder alpha(0.5);
  InitialDataSpec spec;
  spec.rho0 = {ShapeSpec::Kind::getoor, 0.0, 1.0, std::nullopt, ""};
  spec.mode = InitialMode::zero_G;
  const State s = make_initial_state(spec, g, alpha, ws).state;
  CHECK(s.G().max_abs() == 0.0);
  const auto U = velocity_profile(alpha);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(s.u()[j] - (*U)(g.x(j))));
  CHECK(err <= 5e-3);
}

TEST_CASE("invalid initial data is rejected") {
  const Grid1D g(256, 4.0);
  SpectralWorkspace ws(g);
  const FracOrder alpha(0.5);
  const auto path = std::filesystem::temp_directory_path() / "ealign_negative.csv";
  {
    std::ofstream out(path);
    out << "# x,value\n";
    for (int j = 0; j < 16; ++j) out << -2.0 + 0.25 * j << ',' << (j == 7 ? -0.1 : 0.2) << '\n';
  }
  InitialDataSpec spec;
  spec.rho0.kind = ShapeSpec::Kind::csv;
  spec.rho0.csv_path = path.string();
  CHECK_THROWS_AS(make_initial_state(spec, g, alpha, ws), InputError);
  std::filesystem::remove(path);

  InitialDataSpec wide;
  wide.rho0 = {ShapeSpec::Kind::bump, 0.0, 3.0, std::nullopt, ""};
  CHECK_THROWS_AS(make_initial_state(wide, g, alpha, ws), InputError);

  InitialDataSpec narrow;
  narrow.rho0 = {ShapeSpec::Kind::gaussian, 0.0, -1.0, std::nullopt, ""};
  CHECK_THROWS_AS(make_initial_state(narrow, g, alpha, ws), InputError);
}

TEST_CASE("config validation") {
  SolverConfig c = gaussian_config(FluxScheme::upwind);
  CHECK_NOTHROW(c.validate());
  auto bad = [&](auto&& mutate) {
    SolverConfig b = c;
    mutate(b);
    CHECK_THROWS_AS(b.validate(), InputError);
  };
  bad([](SolverConfig& b) { b.alpha = 1.0; });
  bad([](SolverConfig& b) { b.epsilon = -1.0; });
  bad([](SolverConfig& b) { b.t_end = -1.0; });
  bad([](SolverConfig& b) { b.cfl = 0.0; });
  bad([](SolverConfig& b) { b.n = 7; });
  bad([](SolverConfig& b) { b.output_times = {0.5, 0.2}; });
  bad([](SolverConfig& b) { b.output_times = {2.0}; });
  bad([](SolverConfig& b) { b.initial.coef = 2.0; });
  CHECK(c.viscosity() == c.grid().spacing());
}

TEST_CASE("each step conserves mass") {
  for (FluxScheme scheme : {FluxScheme::spectral, FluxScheme::upwind}) {
    const SolverConfig cfg = gaussian_config(scheme);
    const Grid1D g = cfg.grid();
    SpectralWorkspace ws(g);
    State s = make_initial_state(cfg.initial, g, FracOrder(0.5), ws).state;
    const double m_rho = integrate(s.rho()), m_G = integrate(s.G());
    for (int i = 0; i < 50; ++i) {
      s = step(s, detail::max_stable_dt(s, cfg.cfl), cfg, ws);
      CHECK(std::abs(integrate(s.rho()) / m_rho - 1.0) <= 1e-13);
      CHECK(std::abs(integrate(s.G()) / m_G - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("steps beyond the CFL limit are refused") {
  const SolverConfig cfg = gaussian_config(FluxScheme::upwind);
  const Grid1D g = cfg.grid();
  SpectralWorkspace ws(g);
  const State s = make_initial_state(cfg.initial, g, FracOrder(0.5), ws).state;
  const double dt = detail::max_stable_dt(s, cfg.cfl);
  CHECK_NOTHROW(step(s, dt, cfg, ws));
  CHECK_THROWS_AS(step(s, 1.5 * dt, cfg, ws), RuntimeAbort);
  CHECK_THROWS_AS(step(s, 0.0, cfg, ws), InputError);
}

TEST_CASE("time stepping is second order") {
  // Fixed grid and viscosity; compare dt, dt/2, dt/4.
  SolverConfig cfg = gaussian_config(FluxScheme::spectral, 384, 12.0);
  cfg.epsilon = 0.05;
  cfg.initial.rho0.width = 0.6;
  const double dt = 0.01, t_end = 0.4;
  const State a = advance(cfg, dt, t_end), b = advance(cfg, dt / 2, t_end), c = advance(cfg, dt / 4, t_end);
  const double e1 = lp_norm(a.rho() - b.rho(), 1.0), e2 = lp_norm(b.rho() - c.rho(), 1.0);
  INFO("successive differences " << e1 << ", " << e2);
  CHECK(std::log2(e1 / e2) >= 1.8);
  const double g1 = lp_norm(a.u() - b.u(), kInfNorm), g2 = lp_norm(b.u() - c.u(), kInfNorm);
  CHECK(std::log2(g1 / g2) >= 1.8);
}

TEST_CASE("G0 = rho0 upwind run keeps G = rho and the velocity bound") {
  SolverConfig cfg = gaussian_config(FluxScheme::upwind, 1024, 12.0);
  cfg.t_end = 3.0;
  cfg.output_times = {1.0, 2.0, 3.0};
  const Trajectory traj = run(cfg);
  REQUIRE(traj.states.size() == 4);
  const double u0 = traj.states.front().u().max_abs();
  for (const SummaryRow& r : traj.summary) {
    CHECK(r.min_a_rho_minus_G >= -1e-8);
    CHECK(r.max_b_rho_minus_G <= 1e-8);
    CHECK(r.min_rho >= -1e-12);
    CHECK(r.u_Linf <= u0 + 1e-8);
  }
  for (std::size_t i = 1; i < traj.summary.size(); ++i) CHECK(traj.summary[i].rho_L2 <= traj.summary[i - 1].rho_L2 + 1e-14);
  CHECK(traj.states.back().t() == 3.0);
}

TEST_CASE("run output times") {
  SolverConfig cfg = gaussian_config(FluxScheme::upwind, 256);
  cfg.t_end = 0.0;
  Trajectory traj = run(cfg);
  CHECK(traj.states.size() == 1);
  CHECK(traj.summary.size() == 1);
  CHECK(traj.steps == 0);

  cfg.t_end = 0.5;
  traj = run(cfg);
  CHECK(traj.states.size() == 2);
  CHECK(traj.states.back().t() == 0.5);

  cfg.output_times = {0.0, 0.25};
  traj = run(cfg);
  REQUIRE(traj.states.size() == 2);
  CHECK(traj.states[1].t() == 0.25);
  CHECK(traj.summary.back().t == 0.5);
}

TEST_CASE("runs abort when the support reaches the boundary margin") {
  SolverConfig cfg = gaussian_config(FluxScheme::upwind, 256, 2.0);
  cfg.initial.rho0 = {ShapeSpec::Kind::bump, 0.0, 0.5, 1.0, ""};
  cfg.t_end = 5.0;
  CHECK_THROWS_AS(run(cfg), RuntimeAbort);
}

TEST_CASE("solutions converge as the viscosity decreases") {
  // L1 gaps between runs at eps, eps/2, eps/4, eps/8 shrink.
  SolverConfig cfg = gaussian_config(FluxScheme::spectral, 2048, 8.0);
  cfg.initial.rho0.width = 0.3;
  cfg.t_end = 1.0;
  std::vector<Field> rho;
  for (double eps : {0.08, 0.04, 0.02, 0.01}) {
    cfg.epsilon = eps;
    rho.push_back(run(cfg).states.back().rho());
  }
  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) gaps.push_back(lp_norm(rho[i] - rho[i + 1], 1.0));
  INFO("gaps " << gaps[0] << ", " << gaps[1] << ", " << gaps[2]);
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) CHECK(gaps[i + 1] < gaps[i]);
}

TEST_CASE("summary row") {
  const Grid1D g(64, 4.0);
  SpectralWorkspace ws(g);
  const Field rho = Field::sample(g, [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  const State s(rho, 0.5 * rho, 0.0, FracOrder(0.5), ws);
  const SummaryRow r = summarize(s, {true, 2.0, 0.25});
  CHECK_THAT(r.M_rho, WithinRel(integrate(rho), 1e-15));
  CHECK_THAT(r.M_G, WithinRel(0.5 * integrate(rho), 1e-15));
  CHECK(r.rho_Linf == 1.0);
  CHECK(r.G_Linf == 0.5);
  CHECK(r.min_a_rho_minus_G == 0.0);
  CHECK(r.max_b_rho_minus_G == 0.0);
  CHECK_THAT(r.rho_L4, WithinRel(std::pow(integrate(rho), 0.25), 1e-14));
}
