#pragma once

/// Flat `key = value` config files with [section] headers.
///
///   [grid]     n, half_width
///   [model]    alpha, epsilon (number or "auto" for eps = h)
///   [time]     t_end, cfl, flux_scheme (spectral|upwind), output_times (comma list)
///   [initial]  shape (gaussian|bump|getoor|csv), center, width, mass, csv,
///              mode (proportional|independent|zero_G), coef, a, b
///   [initial.G] shape, center, width, mass, csv   (independent mode)
///   [scaling]  mode (rarefaction|barenblatt), lambdas, q, R, t1, t2, samples
///
/// Unknown sections or keys are errors.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ealign/diagnostics.hpp"
#include "ealign/error.hpp"
#include "ealign/solver.hpp"

namespace ealign {

struct ScalingSection {
  ScalingMode mode = ScalingMode::rarefaction;
  ScalingParams params;
};

struct RunConfig {
  SolverConfig solver;
  std::optional<ScalingSection> scaling;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError("key '" + key + "': not a number: '" + v + "'");
  return out;
}

inline std::size_t parse_size(const std::string& v, const std::string& key) {
  std::size_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError("key '" + key + "': not a non-negative integer: '" + v + "'");
  return out;
}

inline std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, key));
  }
  return out;
}

inline ShapeSpec::Kind parse_shape(const std::string& v) {
  if (v == "gaussian") return ShapeSpec::Kind::gaussian;
  if (v == "bump") return ShapeSpec::Kind::bump;
  if (v == "getoor") return ShapeSpec::Kind::getoor;
  if (v == "csv") return ShapeSpec::Kind::csv;
  throw InputError("unknown shape '" + v + "'");
}

inline bool apply_shape_key(ShapeSpec& s, const std::string& key, const std::string& v) {
  if (key == "shape") s.kind = parse_shape(v);
  else if (key == "center") s.center = parse_double(v, key);
  else if (key == "width") s.width = parse_double(v, key);
  else if (key == "mass") s.mass = parse_double(v, key);
  else if (key == "csv") s.csv_path = v;
  else return false;
  return true;
}

}  // namespace detail

inline FluxScheme parse_flux_scheme(const std::string& v) {
  if (v == "spectral") return FluxScheme::spectral;
  if (v == "upwind") return FluxScheme::upwind;
  throw InputError("unknown flux scheme '" + v + "'");
}

inline ScalingMode parse_scaling_mode(const std::string& v) {
  if (v == "rarefaction") return ScalingMode::rarefaction;
  if (v == "barenblatt") return ScalingMode::barenblatt;
  throw InputError("unknown scaling mode '" + v + "'");
}

inline RunConfig parse_config(std::istream& in, const std::string& origin = "<config>") {
  RunConfig rc;
  SolverConfig& c = rc.solver;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(where + "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "model" && section != "time" && section != "initial" &&
          section != "initial.G" && section != "scaling")
        throw InputError(where + "unknown section [" + section + "]");
      if (section == "scaling" && !rc.scaling) rc.scaling.emplace();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where + "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string v = detail::trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    try {
      bool known = true;
      if (section == "grid") {
        if (key == "n") c.n = detail::parse_size(v, full);
        else if (key == "half_width") c.half_width = detail::parse_double(v, full);
        else known = false;
      } else if (section == "model") {
        if (key == "alpha") c.alpha = detail::parse_double(v, full);
        else if (key == "epsilon") c.epsilon = v == "auto" ? std::nullopt : std::optional(detail::parse_double(v, full));
        else known = false;
      } else if (section == "time") {
        if (key == "t_end") c.t_end = detail::parse_double(v, full);
        else if (key == "cfl") c.cfl = detail::parse_double(v, full);
        else if (key == "flux_scheme") c.flux_scheme = parse_flux_scheme(v);
        else if (key == "output_times") c.output_times = detail::parse_list(v, full);
        else known = false;
      } else if (section == "initial") {
        if (detail::apply_shape_key(c.initial.rho0, key, v)) {
        } else if (key == "mode") {
          if (v == "proportional") c.initial.mode = InitialMode::proportional;
          else if (v == "independent") c.initial.mode = InitialMode::independent;
          else if (v == "zero_G") c.initial.mode = InitialMode::zero_G;
          else throw InputError("unknown mode '" + v + "'");
        } else if (key == "coef") c.initial.coef = detail::parse_double(v, full);
        else if (key == "a") c.initial.a_coef = detail::parse_double(v, full);
        else if (key == "b") c.initial.b_coef = detail::parse_double(v, full);
        else known = false;
      } else if (section == "initial.G") {
        known = detail::apply_shape_key(c.initial.G0, key, v);
      } else if (section == "scaling") {
        ScalingSection& s = *rc.scaling;
        if (key == "mode") s.mode = parse_scaling_mode(v);
        else if (key == "lambdas") s.params.lambdas = detail::parse_list(v, full);
        else if (key == "q") s.params.q = detail::parse_double(v, full);
        else if (key == "R") s.params.R = detail::parse_double(v, full);
        else if (key == "t1") s.params.t1 = detail::parse_double(v, full);
        else if (key == "t2") s.params.t2 = detail::parse_double(v, full);
        else if (key == "samples") s.params.time_samples = detail::parse_size(v, full);
        else known = false;
      } else {
        throw InputError("key outside any section");
      }
      if (!known) throw InputError("unknown key '" + key + "' in [" + section + "]");
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  c.validate();
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path);
  return parse_config(in, path);
}

inline std::string to_ini(const RunConfig& rc) {
  const SolverConfig& c = rc.solver;
  std::ostringstream o;
  auto shape = [&](const ShapeSpec& s) {
    o << "shape = " << to_string(s.kind) << "\ncenter = " << format_real(s.center)
      << "\nwidth = " << format_real(s.width) << '\n';
    if (s.mass) o << "mass = " << format_real(*s.mass) << '\n';
    if (!s.csv_path.empty()) o << "csv = " << s.csv_path << '\n';
  };
  o << "[grid]\nn = " << c.n << "\nhalf_width = " << format_real(c.half_width) << "\n\n";
  o << "[model]\nalpha = " << format_real(c.alpha)
    << "\nepsilon = " << (c.epsilon ? format_real(*c.epsilon) : std::string("auto")) << "\n\n";
  o << "[time]\nt_end = " << format_real(c.t_end) << "\ncfl = " << format_real(c.cfl)
    << "\nflux_scheme = " << to_string(c.flux_scheme) << "\noutput_times = ";
  for (std::size_t i = 0; i < c.output_times.size(); ++i) o << (i ? ", " : "") << format_real(c.output_times[i]);
  o << "\n\n[initial]\n";
  shape(c.initial.rho0);
  o << "mode = " << to_string(c.initial.mode) << "\ncoef = " << format_real(c.initial.coef)
    << "\na = " << format_real(c.initial.a_coef) << "\nb = " << format_real(c.initial.b_coef) << '\n';
  if (c.initial.mode == InitialMode::independent) {
    o << "\n[initial.G]\n";
    shape(c.initial.G0);
  }
  if (rc.scaling) {
    const ScalingParams& p = rc.scaling->params;
    o << "\n[scaling]\nmode = " << to_string(rc.scaling->mode) << "\nlambdas = ";
    for (std::size_t i = 0; i < p.lambdas.size(); ++i) o << (i ? ", " : "") << format_real(p.lambdas[i]);
    o << "\nq = " << format_real(p.q) << "\nR = " << format_real(p.R) << "\nt1 = " << format_real(p.t1)
      << "\nt2 = " << format_real(p.t2) << "\nsamples = " << p.time_samples << '\n';
  }
  return o.str();
}

}  // namespace ealign
