#pragma once

#include <cmath>
#include <numbers>

#include "ealign/error.hpp"

namespace ealign {

/// Fractional order alpha, strictly inside (0, 1).
class FracOrder {
 public:
  explicit FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("fractional order must lie in (0,1)");
  }
  double value() const { return alpha_; }
  operator double() const { return alpha_; }

 private:
  double alpha_;
};

/// c_alpha in Lambda^alpha f(x) = c_alpha * p.v. int (f(x)-f(y))/|x-y|^{1+alpha} dy,
/// the constant that makes the singular integral agree with the symbol |xi|^alpha.
inline double fraclap_constant(FracOrder alpha) {
  const double a = alpha.value();
  return std::tgamma(1.0 + a) * std::sin(0.5 * std::numbers::pi * a) / std::numbers::pi;
}

}  // namespace ealign
