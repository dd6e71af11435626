#include "bisstar/shape_param.hpp"

#include <cmath>
#include <limits>

namespace bisstar {

namespace {
// exp(x) overflows a double slightly above this.
constexpr double kExpOverflow = 709.0;
}  // namespace

XReal transform_g(double v, ShapeParam s) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("transform_g: v must lie in [0, 1]");
  switch (s.regime()) {
    case ShapeRegime::Negative: {
      if (v == 0.0) return XReal::neg_inf();
      double e = s.value() * std::log(v);  // >= 0
      if (e > kExpOverflow) return XReal::neg_inf();
      return XReal(-std::exp(e));
    }
    case ShapeRegime::Zero:
      return v == 0.0 ? XReal::neg_inf() : XReal(std::log(v));
    case ShapeRegime::Positive:
      if (v == 0.0) return XReal(0.0);
      return XReal(std::exp(s.value() * std::log(v)));
  }
  return XReal(0.0);  // unreachable
}

namespace {

double inverse_h_impl(XReal w, ShapeParam s, bool clamp) {
  const double tol = 1e-12;
  switch (s.regime()) {
    case ShapeRegime::Negative: {
      // range of g: [-inf, -1]
      if (w.is_neg_inf()) return 0.0;
      double x = w.raw();
      if (x > -1.0) {
        if (clamp || x <= -1.0 + tol) return 1.0;
        throw std::domain_error("inverse_h: value above the range of g (s* < 0)");
      }
      return std::exp(std::log(-x) / s.value());
    }
    case ShapeRegime::Zero: {
      // range of g: [-inf, 0]
      if (w.is_neg_inf()) return 0.0;
      double x = w.raw();
      if (x > 0.0) {
        if (clamp || x <= tol) return 1.0;
        throw std::domain_error("inverse_h: value above the range of g (s* = 0)");
      }
      return std::exp(x);
    }
    case ShapeRegime::Positive: {
      // range of g: [0, 1]
      double x = w.raw();
      if (x < 0.0) {
        if (clamp || x >= -tol) return 0.0;
        throw std::domain_error("inverse_h: value below the range of g (s* > 0)");
      }
      if (x > 1.0) {
        if (clamp || x <= 1.0 + tol) return 1.0;
        throw std::domain_error("inverse_h: value above the range of g (s* > 0)");
      }
      if (x == 0.0) return 0.0;
      return std::exp(std::log(x) / s.value());
    }
  }
  return 0.0;  // unreachable
}

}  // namespace

double inverse_h(XReal w, ShapeParam s) { return inverse_h_impl(w, s, /*clamp=*/false); }

double inverse_h_clamped(XReal w, ShapeParam s) {
  double v = inverse_h_impl(w, s, /*clamp=*/true);
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace bisstar
