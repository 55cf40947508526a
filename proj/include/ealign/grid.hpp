#pragma once

/// Uniform periodic grid on [-L, L), sampled fields, quadrature and norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ealign/error.hpp"

namespace ealign {

class Grid1D {
 public:
  Grid1D(std::size_t n, double half_width) : n_(n), half_width_(half_width) {
    if (n < 8) throw InputError("grid needs at least 8 points, got " + std::to_string(n));
    if (n % 2 != 0) throw InputError("grid size must be even, got " + std::to_string(n));
    if (!std::isfinite(half_width) || half_width <= 0.0)
      throw InputError("grid half width must be positive and finite");
  }

  std::size_t size() const { return n_; }
  double half_width() const { return half_width_; }
  double length() const { return 2.0 * half_width_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  double x(std::size_t j) const { return -half_width_ + static_cast<double>(j) * spacing(); }

  std::vector<double> points() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
    return xs;
  }

  /// Angular wavenumber pi*k/L for signed mode index k in [-n/2, n/2).
  double wavenumber(long k) const { return std::numbers::pi * static_cast<double>(k) / half_width_; }

  /// Wavenumbers in ascending order, k = -n/2 .. n/2-1.
  std::vector<double> wavenumbers() const {
    std::vector<double> xi(n_);
    const long half = static_cast<long>(n_ / 2);
    for (long k = -half; k < half; ++k) xi[static_cast<std::size_t>(k + half)] = wavenumber(k);
    return xi;
  }

  /// Non-negative wavenumber of the r2c coefficient index m in [0, n/2].
  double rfft_wavenumber(std::size_t m) const { return wavenumber(static_cast<long>(m)); }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.n_ == b.n_ && a.half_width_ == b.half_width_;
  }

 private:
  std::size_t n_;
  double half_width_;
};

inline Grid1D build_grid(std::size_t n, double half_width) { return Grid1D(n, half_width); }

/// Real samples on a grid. Every constructed Field holds finite values only.
class Field {
 public:
  explicit Field(const Grid1D& grid) : grid_(grid), values_(grid.size(), 0.0) {}

  Field(const Grid1D& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InputError("field has " + std::to_string(values_.size()) + " samples, grid has " +
                       std::to_string(grid_.size()));
    check_finite();
  }

  template <class F>
  static Field sample(const Grid1D& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = f(grid.x(j));
    return Field(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  Field& operator+=(const Field& o) {
    require_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

  void require_same_grid(const Field& o) const {
    if (!(grid_ == o.grid_)) throw InputError("fields live on different grids");
  }

 private:
  void check_finite() const {
    for (std::size_t j = 0; j < values_.size(); ++j)
      if (!std::isfinite(values_[j]))
        throw RuntimeAbort("non-finite sample at index " + std::to_string(j));
  }

  Grid1D grid_;
  std::vector<double> values_;
};

/// Periodic trapezoid rule, h * sum f_j.
inline double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().spacing() * s;
}

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw InputError("lp_norm needs p >= 1");
  if (std::isinf(p)) return f.max_abs();
  if (p == 1.0) {
    double s = 0.0;
    for (double v : f.values()) s += std::abs(v);
    return f.grid().spacing() * s;
  }
  // Scale by the max to avoid overflow for large p.
  const double m = f.max_abs();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(f.grid().spacing() * s, 1.0 / p);
}

/// Cumulative trapezoid integral from the left grid edge; g(x_0) = 0.
inline Field antiderivative(const Field& f) {
  const auto v = f.values();
  const double h = f.grid().spacing();
  std::vector<double> g(v.size(), 0.0);
  for (std::size_t j = 1; j < v.size(); ++j) g[j] = g[j - 1] + 0.5 * h * (v[j - 1] + v[j]);
  return Field(f.grid(), std::move(g));
}

/// Linear interpolation of grid samples at x; zero outside [x_0, x_{n-1}].
inline double interpolate_linear(const Field& f, double x) {
  const Grid1D& g = f.grid();
  const double s = (x - g.x(0)) / g.spacing();
  if (s < 0.0 || s > static_cast<double>(g.size() - 1)) return 0.0;
  const auto j = std::min(static_cast<std::size_t>(s), g.size() - 2);
  const double w = s - static_cast<double>(j);
  return (1.0 - w) * f[j] + w * f[j + 1];
}

// ---- CSV ----------------------------------------------------------------

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeAbort("cannot open " + path + " for writing");
  out << "# x,value\n";
  for (std::size_t j = 0; j < f.size(); ++j)
    out << format_real(f.grid().x(j)) << ',' << format_real(f[j]) << '\n';
}

/// Reads a two-column "# x,value" CSV written on a uniform grid [-L, L).
inline Field read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double x = 0.0, v = 0.0;
    char comma = 0;
    if (!(ss >> x >> comma >> v) || comma != ',') throw InputError("malformed CSV line in " + path + ": " + line);
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 8) throw InputError(path + " has fewer than 8 samples");
  const double h = xs[1] - xs[0];
  const Grid1D grid(xs.size(), -xs.front());
  if (std::abs(grid.spacing() - h) > 1e-9 * std::abs(h))
    throw InputError(path + " is not sampled on a symmetric uniform grid [-L, L)");
  return Field(grid, std::move(vs));
}

}  // namespace ealign
