#pragma once

#include <stdexcept>

#include "bisstar/xreal.hpp"

namespace bisstar {

enum class ShapeRegime { Negative, Zero, Positive };

/// The shape constraint parameter s* in (-inf, 1].  The sign selects the
/// transform regime: for s* < 0 the constraint is convexity of F^{s*} and
/// (1-F)^{s*}, for s* = 0 log-concavity of F and 1-F, and for 0 < s* <= 1
/// concavity of F^{s*} and (1-F)^{s*} on the appropriate half-lines.
class ShapeParam {
 public:
  explicit ShapeParam(double s_star) : s_(s_star) {
    if (!(s_star <= 1.0)) throw std::invalid_argument("ShapeParam: s* must be <= 1");
  }

  double value() const { return s_; }
  ShapeRegime regime() const {
    if (s_ < 0.0) return ShapeRegime::Negative;
    if (s_ > 0.0) return ShapeRegime::Positive;
    return ShapeRegime::Zero;
  }

 private:
  double s_;
};

/// Monotone transform g mapping a band value v in [0, 1] into the concave
/// space: -v^{s*} for s* < 0, log v for s* = 0, v^{s*} for s* > 0.  In every
/// regime g is nondecreasing and "F bi-s*-concave" maps to "g(F) concave".
/// Values whose magnitude overflows a double saturate to -inf, which in the
/// concave space means "no constraint from below".
XReal transform_g(double v, ShapeParam s);

/// Inverse of transform_g on its range; h(g(v)) == v for v in [0, 1].
/// Arguments outside the closure of the range throw.
double inverse_h(XReal w, ShapeParam s);

/// Monotone extension of inverse_h to all of [-inf, +inf], clamped into
/// [0, 1].  Used when evaluating envelope lines outside the range of g.
double inverse_h_clamped(XReal w, ShapeParam s);

}  // namespace bisstar
