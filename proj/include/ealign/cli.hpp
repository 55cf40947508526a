#pragma once

/// Command-line front end. `run_cli` is the whole program; tools/ealign.cpp only forwards argv.
///
/// Exit codes: 0 pass, 1 check failure, 2 bad input, 3 runtime abort.
/// Every command writes manifest.json into the output directory, also on failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ealign/config.hpp"
#include "ealign/diagnostics.hpp"
#include "ealign/io.hpp"
#include "ealign/selftest.hpp"
#include "ealign/solver.hpp"

namespace ealign {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kBadInput = 2, kRuntimeAbort = 3 };

struct CliContext {
  fs::path out = "ealign_out";
  unsigned jobs = 0;
  unsigned seed = 12345;
  std::string tolerance_profile = "default";
  std::string config;
  std::ostream* log = &std::cerr;

  double tolerance_scale() const { return tolerance_profile == "strict" ? 0.5 : 1.0; }
};

/// Collects what ends up in manifest.json.
class Manifest {
 public:
  Manifest(std::string command, fs::path out) : out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["code_version"] = kVersion;
    doc_["config"] = nullptr;
    doc_["outputs"] = json::array();
    doc_["checks"] = json::object();
  }

  void set_config(const json& c) { doc_["config"] = c; }
  void add_output(const std::string& f) { doc_["outputs"].push_back(f); }
  void add_outputs(const std::vector<std::string>& fs) {
    for (const auto& f : fs) add_output(f);
  }
  void check(const std::string& name, bool pass) {
    doc_["checks"][name] = pass;
    all_pass_ = all_pass_ && pass;
  }
  bool all_pass() const { return all_pass_; }
  json& doc() { return doc_; }

  /// Writes the manifest with the given status and returns the exit code.
  int finish(int code, const std::string& message = "") {
    static const char* names[] = {"pass", "check_failure", "bad_input", "runtime_abort"};
    doc_["status"] = names[code];
    doc_["exit_code"] = code;
    if (!message.empty()) doc_["message"] = message;
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    try {
      fs::create_directories(out_);
      write_json(out_ / "manifest.json", doc_);
    } catch (const std::exception& e) {
      std::cerr << "error: could not write manifest: " << e.what() << '\n';
      if (code == kPass) return kRuntimeAbort;
    }
    return code;
  }

 private:
  json doc_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  bool all_pass_ = true;
};

// ---- commands -------------------------------------------------------------

inline int cmd_selftest(const CliContext& ctx, Manifest& m, bool inject_hilbert_sign_error = false) {
  SelftestOptions opt;
  opt.tolerance_scale = ctx.tolerance_scale();
  opt.seed = ctx.seed;
  opt.inject_hilbert_sign_error = inject_hilbert_sign_error;
  const auto records = run_selftest(opt);
  json report = json::array();
  for (const auto& r : records) {
    report.push_back({{"op", r.op},
                      {"alpha", r.alpha},
                      {"n", r.n},
                      {"max_error", r.max_error},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass()}});
    m.check(r.op + (r.alpha > 0.0 ? "@" + format_real(r.alpha) : ""), r.pass());
    *ctx.log << (r.pass() ? "PASS " : "FAIL ") << r.op << " alpha=" << r.alpha << " err=" << r.max_error
             << " tol=" << r.tolerance << '\n';
  }
  fs::create_directories(ctx.out);
  write_json(ctx.out / "selftest.json", report);
  m.add_output("selftest.json");
  return m.all_pass() ? kPass : kCheckFailure;
}

/// Checks every run is expected to satisfy; applies to simulate and to verify.
struct CheckTolerances {
  double mass = 1e-10;
  double max_principle = 1e-6;
  double lp_monotone = 1e-6;
  double comparison = 1e-6;
  double decay_margin = 0.05;
  CheckTolerances scaled(double s) const {
    return {mass * s, max_principle * s, lp_monotone * s, comparison * s, decay_margin * s};
  }
};

inline void record_run_checks(const Trajectory& traj, const std::set<std::string>& which, const CheckTolerances& tol,
                              Manifest& m, json& report) {
  const bool monotone_scheme = traj.config.flux_scheme == FluxScheme::upwind;
  if (which.count("mass") && !traj.summary.empty()) {
    const RunChecks c = run_checks(traj);
    report["mass"] = {{"drift_rho", c.mass_drift_rho}, {"drift_G", c.mass_drift_G}};
    m.check("mass", c.mass_drift_rho <= tol.mass && c.mass_drift_G <= tol.mass);
  }
  if (which.count("maxprinciple") && !traj.summary.empty()) {
    const RunChecks c = run_checks(traj);
    report["maxprinciple"] = {{"u_max_excess", c.u_max_excess}, {"lp_increase", c.lp_increase}};
    m.check("maxprinciple", c.u_max_excess <= tol.max_principle);
    // The L^p bounds are exact for the monotone scheme only.
    if (monotone_scheme) m.check("lp_monotone", c.lp_increase <= tol.lp_monotone);
  }
  if (which.count("comparison")) {
    const ComparisonReport c = comparison_principle_report(traj);
    report["comparison"] = to_json(c);
    if (monotone_scheme && traj.sandwich.holds) m.check("comparison", c.passes(tol.comparison));
  }
  if (which.count("decay")) {
    json d = json::array();
    bool ok = true;
    for (auto [p, of_G] : {std::pair{2.0, false}, {4.0, false}, {kInfNorm, true}}) {
      const auto [ts, ns] = state_norm_series(traj, p, of_G);
      const DecayFit fit = decay_fit(ts, ns, p, DecayReference::viscosity_bound, traj.config.alpha);
      json j = to_json(fit);
      j["field"] = of_G ? "G" : "rho";
      j["sharp_slope"] = reference_decay_slope(DecayReference::sharp, p, traj.config.alpha);
      d.push_back(j);
      ok = ok && fit.fitted_slope <= fit.reference_slope + tol.decay_margin;
    }
    report["decay"] = d;
    m.check("decay", ok);
  }
  if (which.count("oleinik")) {
    const OleinikReport r = oleinik_check(traj);
    report["oleinik"] = to_json(r);
    m.check("oleinik", r.bounded);
  }
}

inline int cmd_simulate(const CliContext& ctx, Manifest& m) {
  if (ctx.config.empty()) throw InputError("simulate needs --config");
  const RunConfig rc = load_config(ctx.config);
  m.set_config(to_json(rc.solver));
  const Trajectory traj = run(rc.solver);
  m.add_outputs(write_trajectory(traj, ctx.out));
  json report;
  report["steps"] = traj.steps;
  report["sandwich"] = {{"holds", traj.sandwich.holds}, {"a", traj.sandwich.a}, {"b", traj.sandwich.b}};
  record_run_checks(traj, {"mass", "maxprinciple", "comparison"}, CheckTolerances{}.scaled(ctx.tolerance_scale()), m,
                    report);
  write_json(ctx.out / "checks.json", report);
  m.add_output("checks.json");
  write_text(ctx.out / "summary.gp",
             gnuplot_script("norms of rho", "summary.csv", "t", {{5, "||rho||_2"}, {6, "||rho||_4"}, {7, "||rho||_inf"}}));
  m.add_output("summary.gp");
  return m.all_pass() ? kPass : kCheckFailure;
}

inline int cmd_verify(const CliContext& ctx, Manifest& m, const std::string& dir, std::set<std::string> which) {
  if (dir.empty()) throw InputError("verify needs --dir");
  static const std::set<std::string> known = {"mass", "comparison", "maxprinciple", "decay", "oleinik"};
  if (which.empty()) which = known;
  for (const auto& w : which)
    if (!known.count(w)) throw InputError("unknown check '" + w + "'");
  const Trajectory traj = read_trajectory(dir);
  m.set_config(to_json(traj.config));
  json report;
  record_run_checks(traj, which, CheckTolerances{}.scaled(ctx.tolerance_scale()), m, report);
  fs::create_directories(ctx.out);
  write_json(ctx.out / "verify.json", report);
  m.add_output("verify.json");
  return m.all_pass() ? kPass : kCheckFailure;
}

inline int cmd_scaling(const CliContext& ctx, Manifest& m, const std::string& mode_override,
                       const std::vector<double>& lambdas_override) {
  if (ctx.config.empty()) throw InputError("scaling needs --config");
  RunConfig rc = load_config(ctx.config);
  ScalingSection s = rc.scaling.value_or(ScalingSection{});
  if (!mode_override.empty()) s.mode = parse_scaling_mode(mode_override);
  if (!lambdas_override.empty()) s.params.lambdas = lambdas_override;
  s.params.jobs = ctx.jobs;
  rc.scaling = s;
  json cfg = to_json(rc.solver);
  cfg["scaling"] = {{"mode", to_string(s.mode)}, {"lambdas", s.params.lambdas}};
  m.set_config(cfg);

  const ScalingReport rep = s.mode == ScalingMode::rarefaction
                                ? scaling_limit_experiment(rc.solver, s.params)
                                : barenblatt_limit_experiment(rc.solver, s.params.lambdas, ctx.jobs);
  fs::create_directories(ctx.out);
  write_json(ctx.out / "scaling.json", to_json(rep));
  std::ostringstream csv;
  csv << "# lambda,distance\n";
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
    csv << format_real(rep.lambdas[i]) << ',' << format_real(rep.distances[i]) << '\n';
  write_text(ctx.out / "scaling.csv", csv.str());
  write_text(ctx.out / "scaling.gp", gnuplot_script(std::string(to_string(rep.mode)) + " scaling limit",
                                                    "scaling.csv", "lambda", {{2, "distance"}}, true));
  m.add_outputs({"scaling.json", "scaling.csv", "scaling.gp"});
  m.check("distance_decreasing", strictly_decreasing(rep.distances));
  if (rep.mode == ScalingMode::rarefaction) {
    m.check("rho_distance_decreasing", strictly_decreasing(rep.rho_distances));
    m.check("G_distance_decreasing", strictly_decreasing(rep.G_distances));
  }
  return m.all_pass() ? kPass : kCheckFailure;
}

/// Phi_alpha, Lambda^alpha Phi_alpha and U on [-3, 3] (midpoints, so |x| = 1 is never hit).
inline int cmd_profiles(const CliContext& ctx, Manifest& m, double alpha_value) {
  const FracOrder alpha(alpha_value);
  m.set_config({{"alpha", alpha_value}});
  const auto prof = velocity_profile(alpha);
  std::ostringstream csv;
  csv << "# x,phi,fraclap_phi,U\n";
  const int n = 1200;
  for (int i = 0; i < n; ++i) {
    const double x = -3.0 + 6.0 * (i + 0.5) / n;
    csv << format_real(x) << ',' << format_real(getoor_profile(alpha, x)) << ','
        << format_real(getoor_fraclap(alpha, x)) << ',' << format_real((*prof)(x)) << '\n';
  }
  fs::create_directories(ctx.out);
  write_text(ctx.out / "profiles.csv", csv.str());
  write_text(ctx.out / "profiles.gp",
             gnuplot_script("Getoor profile, alpha = " + format_real(alpha_value), "profiles.csv", "x",
                            {{2, "Phi"}, {3, "Lambda^alpha Phi"}, {4, "U"}}));
  m.add_outputs({"profiles.csv", "profiles.gp"});
  m.check("velocity_jump_across_support", std::abs((*prof)(1.0) - (*prof)(-1.0) - 2.0) < 1e-12);
  return m.all_pass() ? kPass : kCheckFailure;
}

// ---- entry point ------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  CLI::App app{"Numerical laboratory for the 1D Euler alignment system with singular kernel", "ealign"};
  app.require_subcommand(1);
  app.fallthrough();
  CliContext ctx;
  ctx.log = &log;
  std::string out_flag;
  app.add_option("--out", out_flag, "output directory (EULER_ALIGN_OUT overrides)");
  app.add_option("--config", ctx.config, "config file");
  app.add_option("--jobs", ctx.jobs, "worker threads for parameter sweeps (default: logical cores)");
  app.add_option("--seed", ctx.seed, "seed for random test fields");
  app.add_option("--tolerance-profile", ctx.tolerance_profile, "tolerance profile")
      ->check(CLI::IsMember({"default", "strict"}));

  bool inject = false;
  auto* selftest = app.add_subcommand("selftest", "check operator identities against closed forms");
  selftest->add_flag("--inject-hilbert-sign-error", inject)->group("");  // hidden test fixture

  auto* simulate = app.add_subcommand("simulate", "run the solver on --config and write the trajectory");

  std::string dir;
  std::vector<std::string> checks;
  auto* verify = app.add_subcommand("verify", "check a stored trajectory");
  verify->add_option("--dir", dir, "trajectory directory")->required();
  verify->add_option("--checks", checks, "mass, comparison, maxprinciple, decay, oleinik")->delimiter(',');

  std::string mode;
  std::vector<double> lambdas;
  auto* scaling = app.add_subcommand("scaling", "rarefaction or Barenblatt scaling-limit experiment");
  scaling->add_option("--mode", mode, "rarefaction or barenblatt");
  scaling->add_option("--lambdas", lambdas, "scaling factors")->delimiter(',');

  double alpha = 0.5;
  auto* profiles = app.add_subcommand("profiles", "write the Getoor profile, its fractional Laplacian and U");
  profiles->add_option("--alpha", alpha, "order in (0,1)");

  auto resolve_out = [&] {
    if (const char* env = std::getenv("EULER_ALIGN_OUT"); env && *env) ctx.out = env;
    else if (!out_flag.empty()) ctx.out = out_flag;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    resolve_out();
    app.exit(e);
    Manifest m("(unparsed)", ctx.out);
    return m.finish(kBadInput, e.what());
  }
  resolve_out();

  CLI::App* sub = app.get_subcommands().front();
  Manifest m(sub->get_name(), ctx.out);
  try {
    int code = kPass;
    if (sub == selftest) code = cmd_selftest(ctx, m, inject);
    else if (sub == simulate) code = cmd_simulate(ctx, m);
    else if (sub == verify) code = cmd_verify(ctx, m, dir, {checks.begin(), checks.end()});
    else if (sub == scaling) code = cmd_scaling(ctx, m, mode, lambdas);
    else code = cmd_profiles(ctx, m, alpha);
    if (code != kPass) log << "checks failed; see " << (ctx.out / "manifest.json").string() << '\n';
    return m.finish(code, code == kPass ? "" : "one or more checks failed");
  } catch (const InputError& e) {
    log << "error: " << e.what() << '\n';
    return m.finish(kBadInput, e.what());
  } catch (const RuntimeAbort& e) {
    log << "aborted: " << e.what() << '\n';
    return m.finish(kRuntimeAbort, e.what());
  } catch (const std::exception& e) {
    log << "aborted: " << e.what() << '\n';
    return m.finish(kRuntimeAbort, e.what());
  }
}

}  // namespace ealign
