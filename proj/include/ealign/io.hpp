#pragma once

/// Trajectory directories, JSON reports and gnuplot scripts.
///
/// A trajectory directory holds config.ini (echo of the run), state_NNNN.csv
/// per output time with columns x,rho,G,u, and summary.csv with one row per step.

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ealign/config.hpp"
#include "ealign/diagnostics.hpp"
#include "ealign/solver.hpp"

namespace ealign {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "t",      "M_rho",  "M_G",    "rho_L1", "rho_L2", "rho_L4", "rho_Linf", "G_L1",
      "G_L2",   "G_L4",   "G_Linf", "u_Linf", "min_rho", "min_G", "min_a_rho_minus_G", "max_b_rho_minus_G"};
  return cols;
}

inline std::vector<double> summary_values(const SummaryRow& r) {
  return {r.t,    r.M_rho, r.M_G,    r.rho_L1, r.rho_L2, r.rho_L4,  r.rho_Linf, r.G_L1,
          r.G_L2, r.G_L4,  r.G_Linf, r.u_Linf, r.min_rho, r.min_G, r.min_a_rho_minus_G, r.max_b_rho_minus_G};
}

inline SummaryRow summary_from_values(const std::vector<double>& v) {
  if (v.size() != summary_columns().size()) throw InputError("summary row has the wrong number of columns");
  SummaryRow r;
  std::size_t i = 0;
  for (double* f : {&r.t, &r.M_rho, &r.M_G, &r.rho_L1, &r.rho_L2, &r.rho_L4, &r.rho_Linf, &r.G_L1, &r.G_L2,
                    &r.G_L4, &r.G_Linf, &r.u_Linf, &r.min_rho, &r.min_G, &r.min_a_rho_minus_G, &r.max_b_rho_minus_G})
    *f = v[i++];
  return r;
}

inline std::string state_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%04zu.csv", index);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw RuntimeAbort("cannot open " + path.string() + " for writing");
  out << text;
}

inline void write_state_csv(const State& s, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeAbort("cannot open " + path.string() + " for writing");
  out << "# t = " << format_real(s.t()) << "\n# x,rho,G,u\n";
  const Grid1D& g = s.rho().grid();
  for (std::size_t j = 0; j < g.size(); ++j)
    out << format_real(g.x(j)) << ',' << format_real(s.rho()[j]) << ',' << format_real(s.G()[j]) << ','
        << format_real(s.u()[j]) << '\n';
}

/// Writes the trajectory; returns the files written, relative to dir.
inline std::vector<std::string> write_trajectory(const Trajectory& traj, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  write_text(dir / "config.ini", to_ini(RunConfig{traj.config, std::nullopt}));
  files.push_back("config.ini");
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    write_state_csv(traj.states[i], dir / state_file_name(i));
    files.push_back(state_file_name(i));
  }
  std::ostringstream s;
  s << "# ";
  for (std::size_t i = 0; i < summary_columns().size(); ++i) s << (i ? "," : "") << summary_columns()[i];
  s << '\n';
  for (const SummaryRow& r : traj.summary) {
    const auto v = summary_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << format_real(v[i]);
    s << '\n';
  }
  write_text(dir / "summary.csv", s.str());
  files.push_back("summary.csv");
  return files;
}

namespace detail {

inline std::vector<double> split_numbers(const std::string& line, const std::string& where) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_double(trim(item), where));
  return v;
}

}  // namespace detail

/// Reads a directory produced by write_trajectory. Velocities are recomputed from (rho, G).
inline Trajectory read_trajectory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a trajectory directory: " + dir.string());
  Trajectory traj;
  traj.config = load_config((dir / "config.ini").string()).solver;
  const Grid1D grid = traj.config.grid();
  const FracOrder alpha(traj.config.alpha);
  SpectralWorkspace ws(grid);
  traj.sandwich = make_initial_state(traj.config.initial, grid, alpha, ws).sandwich;

  for (std::size_t i = 0;; ++i) {
    const fs::path p = dir / state_file_name(i);
    if (!fs::exists(p)) break;
    std::ifstream in(p);
    std::string line;
    double t = 0.0;
    std::vector<double> rho, G;
    while (std::getline(in, line)) {
      if (line.rfind("# t = ", 0) == 0) t = detail::parse_double(detail::trim(line.substr(6)), p.string());
      if (line.empty() || line[0] == '#') continue;
      const auto v = detail::split_numbers(line, p.string());
      if (v.size() != 4) throw InputError(p.string() + ": expected 4 columns");
      rho.push_back(v[1]);
      G.push_back(v[2]);
    }
    traj.states.emplace_back(Field(grid, std::move(rho)), Field(grid, std::move(G)), t, alpha, ws);
  }
  if (traj.states.empty()) throw InputError(dir.string() + " holds no state files");

  std::ifstream in(dir / "summary.csv");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    traj.summary.push_back(summary_from_values(detail::split_numbers(line, "summary.csv")));
  }
  return traj;
}

// ---- JSON -------------------------------------------------------------------

inline json to_json(const SolverConfig& c) {
  auto shape = [](const ShapeSpec& s) {
    json j{{"shape", to_string(s.kind)}, {"center", s.center}, {"width", s.width}};
    j["mass"] = s.mass ? json(*s.mass) : json(nullptr);
    if (!s.csv_path.empty()) j["csv"] = s.csv_path;
    return j;
  };
  json j;
  j["grid"] = {{"n", c.n}, {"half_width", c.half_width}};
  j["alpha"] = c.alpha;
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json("auto");
  j["epsilon_value"] = c.viscosity();
  j["t_end"] = c.t_end;
  j["cfl"] = c.cfl;
  j["flux_scheme"] = to_string(c.flux_scheme);
  j["output_times"] = c.output_times;
  j["initial"] = {{"rho0", shape(c.initial.rho0)},
                  {"mode", to_string(c.initial.mode)},
                  {"coef", c.initial.coef},
                  {"a", c.initial.a_coef},
                  {"b", c.initial.b_coef}};
  if (c.initial.mode == InitialMode::independent) j["initial"]["G0"] = shape(c.initial.G0);
  return j;
}

inline json to_json(const DecayFit& f) {
  return {{"p", std::isinf(f.p) ? json("inf") : json(f.p)},
          {"fitted_slope", f.fitted_slope},
          {"slope_stderr", f.slope_stderr},
          {"reference_slope", f.reference_slope},
          {"times", f.times},
          {"norms", f.norms}};
}

inline json to_json(const OleinikReport& r) {
  return {{"times", r.times},           {"t_G_sup", r.t_G_sup},
          {"t_ux_sup", r.t_ux_sup},     {"constant", r.constant},
          {"growth_slope_G", r.growth_slope_G}, {"growth_slope_ux", r.growth_slope_ux},
          {"bounded", r.bounded}};
}

inline json to_json(const ComparisonReport& r) {
  return {{"min_G", r.min_G},
          {"min_a_rho_minus_G", r.min_a_rho_minus_G},
          {"min_G_minus_b_rho", r.min_G_minus_b_rho},
          {"rho0_sup", r.rho0_sup}};
}

inline json to_json(const ScalingReport& r) {
  json j{{"mode", to_string(r.mode)}, {"q", r.q}, {"R", r.R}, {"t1", r.t1}, {"t2", r.t2},
         {"lambdas", r.lambdas},      {"distances", r.distances}};
  if (r.mode == ScalingMode::rarefaction) {
    j["distances_excluding_kinks"] = r.distances_excluding_kinks;
    j["rho_distances"] = r.rho_distances;
    j["rho_distances_excluding_kinks"] = r.rho_distances_excluding_kinks;
    j["G_distances"] = r.G_distances;
    j["G_distances_excluding_kinks"] = r.G_distances_excluding_kinks;
  } else {
    j["time_offset"] = r.time_offset;
  }
  return j;
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Gnuplot script plotting columns `ycols` (1-based) of a comma-separated file against column 1.
inline std::string gnuplot_script(const std::string& title, const std::string& csv, const std::string& xlabel,
                                  const std::vector<std::pair<int, std::string>>& ycols, bool logscale = false) {
  std::ostringstream o;
  o << "set datafile separator ','\nset title '" << title << "'\nset xlabel '" << xlabel << "'\nset grid\n";
  if (logscale) o << "set logscale xy\n";
  o << "plot ";
  for (std::size_t i = 0; i < ycols.size(); ++i)
    o << (i ? ", \\\n     " : "") << "'" << csv << "' using 1:" << ycols[i].first << " with lines title '"
      << ycols[i].second << "'";
  o << "\npause -1\n";
  return o.str();
}

}  // namespace ealign
