// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ealign/config.hpp"
#include "ealign/diagnostics.hpp"
#include "ealign/fracops.hpp"
#include "ealign/selftest.hpp"
#include "ealign/solver.hpp"

#ifndef EALIGN_SOURCE_DIR
#define EALIGN_SOURCE_DIR "."
#endif

using namespace ealign;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Criterion {
 public:
  explicit Criterion(int id) : id_(id), start_(std::chrono::steady_clock::now()) {}
  std::ostringstream& note() { return note_; }
  void require(bool ok) { ok_ = ok_ && ok; }
  void finish(double time_limit_s = 0.0) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (time_limit_s > 0.0) {
      note_ << "; runtime " << s << " s (limit " << time_limit_s << " s)";
      require(s < time_limit_s);
    } else {
      note_ << "; runtime " << s << " s";
    }
    std::printf("%s criterion %d: %s\n", ok_ ? "PASS" : "FAIL", id_, note_.str().c_str());
    std::fflush(stdout);
    failures += !ok_;
  }

 private:
  int id_;
  bool ok_ = true;
  std::ostringstream note_;
  std::chrono::steady_clock::time_point start_;
};

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    std::printf("FAIL criterion %d: exception: %s\n", id, e.what());
    ++failures;
  }
}

fs::path config_path(const std::string& name) {
  const char* env = std::getenv("EALIGN_SOURCE_DIR");
  return fs::path(env && *env ? env : EALIGN_SOURCE_DIR) / "configs" / name;
}

Field bump(const Grid1D& g, double xc, double w, double amp) {
  return Field::sample(g, [&](double x) { return amp * smooth_bump((x - xc) / w); });
}

}  // namespace

int main() {
  std::printf("ealign acceptance run\n");

  guarded(1, [] {
    Criterion c(1);
    double worst_spec = 0.0, worst_quad = 0.0;
    for (double a : {0.25, 0.5, 0.75}) {
      const double es = getoor_identity_error_spectral(FracOrder(a));
      const double eq = getoor_identity_error_quadrature(FracOrder(a));
      c.note() << (a > 0.25 ? "; " : "") << "alpha " << a << ": spectral " << es << ", quadrature " << eq;
      worst_spec = std::max(worst_spec, es);
      worst_quad = std::max(worst_quad, eq);
    }
    c.require(worst_spec <= 2e-2 && worst_quad <= 1e-2);
    c.finish(10.0);
  });

  guarded(2, [] {
    Criterion c(2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> cd(-1.5, 1.5), wd(0.5, 1.5), ad(0.2, 2.0);
    const FracOrder alpha(0.5);
    double worst = 0.0;
    int not_decreasing = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const double xc = cd(rng), w = wd(rng), amp = ad(rng);
      double err[2];
      for (int r = 0; r < 2; ++r) {
        const Grid1D g(r ? 2048 : 1024, 4.0);
        SpectralWorkspace ws(g);
        const Field f = bump(g, xc, w, amp);
        const Field s = fractional_laplacian_free(f, alpha, ws);
        double e = 0.0;
        for (int i = -30; i <= 30; ++i) {
          const auto j = static_cast<std::size_t>(std::llround((0.1 * i + 4.0) / g.spacing()));
          e = std::max(e, std::abs(s[j] - fractional_laplacian_quadrature(f, alpha, g.x(j))));
        }
        err[r] = e / f.max_abs();
      }
      worst = std::max(worst, err[0]);
      not_decreasing += !(err[1] < err[0]);
    }
    c.note() << "worst relative error " << worst << " at n=1024, " << not_decreasing
             << " of 20 not decreasing at n=2048";
    c.require(worst <= 5e-2 && not_decreasing == 0);
    c.finish(60.0);
  });

  // The proportional-data spectral run to t = 10 at n = 4096 serves criteria 3, 6, 7 and 11.
  Trajectory decay_run;
  guarded(3, [&] {
    Criterion c(3);
    {
      decay_run = run(load_config(config_path("decay_spectral.ini").string()).solver);
      const RunChecks rc = run_checks(decay_run);
      c.note() << "n=" << decay_run.config.n << ", t_end=" << decay_run.config.t_end << ", " << decay_run.steps
               << " steps, drift rho " << rc.mass_drift_rho << ", drift G " << rc.mass_drift_G;
      c.require(decay_run.config.n == 4096 && decay_run.config.t_end >= 10.0);
      c.require(rc.mass_drift_rho <= 1e-10 && rc.mass_drift_G <= 1e-10);
    }
    c.finish(120.0);
  });

  guarded(4, [] {
    Criterion c(4);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(config_path("").parent_path()))
      if (e.path().extension() == ".ini") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    c.require(!files.empty());
    double worst = -1.0;
    for (const auto& f : files) {
      const RunChecks rc = run_checks(run(load_config(f.string()).solver));
      c.note() << f.filename().string() << " " << rc.u_max_excess << "; ";
      worst = std::max(worst, rc.u_max_excess);
    }
    c.note() << "worst relative excess of ||u||_inf over ||u0||_inf " << worst << " over " << files.size()
             << " configs";
    c.require(worst <= 1e-6);
    c.finish();
  });

  guarded(5, [] {
    Criterion c(5);
    for (double k : {0.5, 1.0, 2.0}) {
      SolverConfig cfg;
      cfg.n = 2048;
      cfg.half_width = 16.0;
      cfg.t_end = 4.0;
      cfg.output_times = {1.0, 2.0, 3.0, 4.0};
      cfg.flux_scheme = FluxScheme::upwind;
      cfg.initial.rho0 = {ShapeSpec::Kind::gaussian, -4.0, 0.5, 1.0, ""};
      cfg.initial.mode = InitialMode::proportional;
      cfg.initial.coef = cfg.initial.a_coef = cfg.initial.b_coef = k;
      const ComparisonReport r = comparison_principle_report(run(cfg));
      c.note() << "c=" << k << ": min G " << r.min_G << ", min(a rho - G) " << r.min_a_rho_minus_G
               << ", min(G - b rho) " << r.min_G_minus_b_rho << "; ";
      c.require(r.passes(1e-6));
    }
    c.note() << "threshold -1e-6 ||rho0||_inf";
    c.finish();
  });

  std::vector<DecayFit> fits;
  guarded(6, [&] {
    Criterion c(6);
    if (decay_run.states.empty()) throw std::runtime_error("no decay run");
    const double alpha = decay_run.config.alpha;
    struct Target {
      double p;
      bool of_G;
      double slope, band;
      const char* name;
    };
    for (const Target t : {Target{2.0, false, -0.5, 0.1, "||rho||_2"}, Target{4.0, false, -0.75, 0.1, "||rho||_4"},
                           Target{kInfNorm, true, -1.0, 0.15, "||G||_inf"}}) {
      const auto [ts, ns] = state_norm_series(decay_run, t.p, t.of_G);
      const DecayFit fit = decay_fit(ts, ns, t.p, DecayReference::viscosity_bound, alpha);
      fits.push_back(fit);
      c.note() << t.name << " slope " << fit.fitted_slope << " (target " << t.slope << " +- " << t.band << "); ";
      c.require(std::abs(fit.fitted_slope - t.slope) <= t.band);
    }
    c.note() << "alpha=" << alpha << ", t in [" << fits.front().times.front() << ", " << fits.front().times.back()
             << "]";
    c.finish(300.0);
  });

  guarded(7, [&] {
    Criterion c(7);
    if (fits.size() != 3) throw std::runtime_error("no decay fits");
    for (const DecayFit& f : fits) {
      c.note() << "p=" << f.p << ": " << f.fitted_slope << " <= " << f.reference_slope + 0.05 << "; ";
      c.require(f.fitted_slope <= f.reference_slope + 0.05);
    }
    c.note() << "bound (-1+1/p)/(2+alpha) + 0.05";
    c.finish();
  });

  guarded(8, [] {
    Criterion c(8);
    const RunConfig rc = load_config(config_path("rarefaction.ini").string());
    if (!rc.scaling || rc.scaling->mode != ScalingMode::rarefaction) throw std::runtime_error("bad rarefaction config");
    ScalingParams p = rc.scaling->params;
    const ScalingReport r = scaling_limit_experiment(rc.solver, p);
    auto list = [](const std::vector<double>& v) {
      std::ostringstream s;
      for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
      return s.str();
    };
    c.note() << "lambda " << list(r.lambdas) << "; u L^" << r.q << " distance " << list(r.distances)
             << "; rho " << list(r.rho_distances) << "; G " << list(r.G_distances);
    c.require(p.q == 2.0);
    c.require(strictly_decreasing(r.distances) && r.distances.back() <= 0.5 * r.distances.front());
    c.require(strictly_decreasing(r.rho_distances) && strictly_decreasing(r.G_distances));
    // q = 3 > 1/alpha, where L^q convergence of the velocity is expected; reported, not graded.
    p.q = 3.0;
    const ScalingReport r3 = scaling_limit_experiment(rc.solver, p);
    c.note() << "; u L^3 distance (report only) " << list(r3.distances);
    c.finish(900.0);
  });

  guarded(9, [] {
    Criterion c(9);
    for (const char* name : {"barenblatt_gaussian.ini", "porous_getoor.ini"}) {
      const RunConfig rc = load_config(config_path(name).string());
      if (!rc.scaling || rc.scaling->mode != ScalingMode::barenblatt) throw std::runtime_error("bad Barenblatt config");
      if (rc.solver.alpha != 0.5 || rc.solver.initial.mode != InitialMode::zero_G)
        throw std::runtime_error("Barenblatt config must be zero_G with alpha 0.5");
      const ScalingReport r = barenblatt_limit_experiment(rc.solver, rc.scaling->params.lambdas);
      c.note() << name << " L1 distances";
      for (double d : r.distances) c.note() << ' ' << d;
      c.note() << "; ";
      if (rc.solver.initial.rho0.kind == ShapeSpec::Kind::getoor) {
        for (double d : r.distances) c.require(d <= 5e-2);
      } else {
        c.require(rc.solver.initial.rho0.kind == ShapeSpec::Kind::gaussian);
        c.require(strictly_decreasing(r.distances));
      }
    }
    c.note() << "Getoor data within 5e-2, Gaussian data decreasing";
    c.finish();
  });

  guarded(10, [] {
    Criterion c(10);
    const Grid1D g(2048, 8.0);
    SpectralWorkspace ws(g);
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> cd(-3.0, 3.0), wd(0.3, 2.0), ad(0.1, 3.0);
    int sv_fail = 0, sv_total = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Field v = bump(g, cd(rng), wd(rng), ad(rng)) + bump(g, cd(rng), wd(rng), ad(rng));
      for (double p : {1.5, 2.0, 3.0})
        for (double a : {0.25, 0.5, 0.75}) {
          sv_fail += !stroock_varopoulos_check(v, p, FracOrder(a), ws).holds;
          ++sv_total;
        }
    }
    const Grid1D gf(16384, 16.0);
    SpectralWorkspace wsf(gf);
    std::vector<double> ratios;
    for (double s : {1.0, 2.0, 4.0}) {
      const Field v = Field::sample(gf, [&](double x) { return s * std::exp(-s * s * x * x); });
      ratios.push_back(gagliardo_nirenberg_check(v, 3.0, 2.0, FracOrder(0.5), wsf).ratio);
    }
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / ratios.front() - 1.0));
    c.note() << "Stroock-Varopoulos failures " << sv_fail << " of " << sv_total
             << "; Gagliardo-Nirenberg ratios " << ratios[0] << ", " << ratios[1] << ", " << ratios[2]
             << " (max relative spread " << spread << ")";
    c.require(sv_fail == 0 && sv_total == 900 && spread <= 0.05);
    c.finish();
  });

  guarded(11, [&] {
    Criterion c(11);
    double worst = 0.0;
    for (const RarefactionTriple rt : {RarefactionTriple(1.0, 1.0), RarefactionTriple(0.5, 2.0)}) {
      int k = 0;
      for (double xc : {-0.5, 0.0, 0.3, 1.0, 2.0})
        for (double tc : {0.0, 1.0}) {
          worst = std::max(worst, std::abs(burgers_weak_residual(rt, TestFunction{xc, 0.8 + 0.1 * k, tc + 0.1 * k, 0.7})));
          ++k;
        }
    }
    c.note() << "worst Burgers weak residual " << worst << " over 2 x 10 test functions; ";
    c.require(worst <= 1e-6);
    if (decay_run.states.empty()) throw std::runtime_error("no decay run");
    const Trajectory upwind = run(load_config(config_path("proportional_upwind.ini").string()).solver);
    for (const Trajectory* t : {static_cast<const Trajectory*>(&decay_run), &upwind}) {
      const OleinikReport r = oleinik_check(*t);
      c.note() << to_string(t->config.flux_scheme) << " run: t max G growth slope " << r.growth_slope_G
               << ", t max (u_x)_+ growth slope " << r.growth_slope_ux << ", constant " << r.constant << "; ";
      c.require(r.bounded);
    }
    c.note() << "bounded means log-log growth slope < 0.5 over the upper half of the run";
    c.finish();
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
