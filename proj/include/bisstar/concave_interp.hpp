#pragma once

#include <vector>

namespace bisstar {

/// Least concave majorant of lower values on a grid.  Values may be -inf
/// (no constraint at that knot); at least two values must be finite.
/// `majorant` is -inf outside the hull interval spanned by the first and
/// last finite knots and piecewise linear inside it.  `active` holds the
/// indices of the hull vertices: the endpoints of the finite support plus
/// every knot where the slope strictly decreases.
struct LcmResult {
  std::vector<double> majorant;
  std::vector<int> active;
};

LcmResult least_concave_majorant(const std::vector<double>& grid,
                                 const std::vector<double>& lower);

/// Result of the two-sided concave interpolation on a finite grid.
///
/// For inputs (l, u) the pair (lo, uo) brackets every concave function g
/// with l <= g <= u on the grid:
///   lo(x) = inf of such g at x   (the least concave majorant of l),
///   uo(x) = sup of such g at x   (a min of lines pinned at (r, lo(r)) for
///           active knots r and passing through (s, u(s)) for grid knots s
///           on the near side of x).
/// When the majorant exceeds u somewhere on the grid no such g exists and
/// `feasible` is false; lo/uo are then meaningless.
class ConcIntResult {
 public:
  bool feasible = false;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& lower_in() const { return lower_; }
  const std::vector<double>& upper_in() const { return upper_; }
  const std::vector<double>& lo_at_knots() const { return lo_knots_; }
  const std::vector<double>& uo_at_knots() const { return uo_knots_; }
  const std::vector<int>& active_knots() const { return active_; }

  /// Evaluates lo at any real x (-inf outside the hull interval).
  double eval_lo(double x) const;
  /// Evaluates uo at any real x (+inf if no admissible line, which cannot
  /// happen between the first and last grid knots for feasible inputs).
  double eval_uo(double x) const;

 private:
  friend ConcIntResult conc_int(const std::vector<double>&, const std::vector<double>&,
                                const std::vector<double>&);

  std::vector<double> grid_, lower_, upper_;
  std::vector<double> lo_knots_, uo_knots_;
  std::vector<int> active_;
  // Per-grid-knot tangent slopes: best (slope-minimizing) line through
  // (s, u(s)) touching the majorant at an active knot left of s, and the
  // slope-maximizing one touching right of s.  NaN when no such knot exists.
  std::vector<double> tangent_from_left_, tangent_from_right_;
};

/// Tolerance for the feasibility test lo <= u on the grid.  Transforms of
/// band values near 0/1 amplify rounding, so a strict comparison would
/// report spurious infeasibility.
inline constexpr double kConcIntFeasibilityTol = 1e-9;

ConcIntResult conc_int(const std::vector<double>& grid, const std::vector<double>& lower,
                       const std::vector<double>& upper);

}  // namespace bisstar
