#pragma once

#include <optional>
#include <vector>

#include "bisstar/band.hpp"
#include "bisstar/concave_interp.hpp"
#include "bisstar/shape_param.hpp"

namespace bisstar {

struct RefineConfig {
  double tol = 1e-10;
  int max_iter = 200;
};

/// Exact evaluators for a refined band away from the knot grid, built from
/// the final concave-interpolation state of both passes.  Between knots the
/// envelopes are transforms of piecewise-linear functions, so chord
/// interpolation of the knot values would overstate the lower envelope;
/// these evaluators avoid that.
class RefinedEnvelopes {
 public:
  RefinedEnvelopes(ShapeParam s, std::optional<ConcIntResult> cdf_side,
                   std::optional<ConcIntResult> survival_side)
      : s_(s), cdf_side_(std::move(cdf_side)), survival_side_(std::move(survival_side)) {}

  double lower(double x) const;
  double upper(double x) const;

 private:
  ShapeParam s_;
  std::optional<ConcIntResult> cdf_side_;
  std::optional<ConcIntResult> survival_side_;
};

struct RefinementResult {
  Band band;
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
  std::optional<RefinedEnvelopes> envelopes;  // set when feasible
};

/// One alternating step of the refinement: concave interpolation in the
/// transformed space applied to (L, U), inverted, then applied to the
/// survival pair (1 - U, 1 - L) and inverted with complementation.
/// Returns the infeasible sentinel if either pass reports infeasibility.
Band refine_once(const Band& band, ShapeParam s, const std::vector<double>& grid);

/// Iterates refine_once until the sup-norm change over the knots drops to
/// tol or max_iter is reached.  The refinement grid is the band's knot grid
/// (unique data values for KS/WKS bands).
RefinementResult refine(const Band& band, ShapeParam s, RefineConfig config = {});

/// Lipschitz constants of Lemma-style slope bounds: for knots a < b with
/// band values u = L(a), v = U(b) in (0, 1), every refined envelope is
/// Lipschitz with constant max(gamma1, gamma2).
struct LipschitzBound {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double bound() const { return gamma1 > gamma2 ? gamma1 : gamma2; }
};
LipschitzBound lipschitz_constants(double a, double b, double u, double v, ShapeParam s);

}  // namespace bisstar
