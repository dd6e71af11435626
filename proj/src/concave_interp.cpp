#include "bisstar/concave_interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(const std::vector<double>& grid, std::size_t values) {
  if (grid.size() != values) throw std::invalid_argument("conc_int: grid/value size mismatch");
  if (grid.size() < 2) throw std::invalid_argument("conc_int: need at least two knots");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw std::invalid_argument("conc_int: knots must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("conc_int: knots must be strictly increasing");
  }
}

double slope(double x0, double y0, double x1, double y1) { return (y1 - y0) / (x1 - x0); }

}  // namespace

LcmResult least_concave_majorant(const std::vector<double>& grid,
                                 const std::vector<double>& lower) {
  validate_grid(grid, lower.size());
  std::vector<int> finite;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || lower[i] == kInf)
      throw std::invalid_argument("least_concave_majorant: lower values must be in [-inf, inf)");
    if (lower[i] > -kInf) finite.push_back(static_cast<int>(i));
  }
  if (finite.size() < 2)
    throw std::invalid_argument(
        "least_concave_majorant: insufficient-support (need >= 2 finite values)");

  // Upper hull of the finite points; equal slopes merge into one piece so the
  // active set keeps only knots where the slope strictly decreases.
  std::vector<int> hull;
  for (int idx : finite) {
    while (hull.size() >= 2) {
      int a = hull[hull.size() - 2];
      int b = hull[hull.size() - 1];
      if (slope(grid[a], lower[a], grid[idx], lower[idx]) >=
          slope(grid[a], lower[a], grid[b], lower[b])) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }

  LcmResult res;
  res.active = hull;
  res.majorant.assign(grid.size(), -kInf);
  std::size_t seg = 0;
  for (int k = hull.front(); k <= hull.back(); ++k) {
    while (seg + 1 < hull.size() && hull[seg + 1] <= k) ++seg;
    if (hull[seg] == k) {
      res.majorant[k] = lower[k];
    } else {
      int a = hull[seg];
      int b = hull[seg + 1];
      double t = (grid[k] - grid[a]) / (grid[b] - grid[a]);
      res.majorant[k] = lower[a] + t * (lower[b] - lower[a]);
    }
  }
  return res;
}

namespace {

// Slope from the point (px, py) to hull vertex j.
struct TangentScan {
  const std::vector<double>* hx;
  const std::vector<double>* hy;
  double px, py;

  double slope_to(int j) const { return ((*hy)[j] - py) / ((*hx)[j] - px); }
};

// phi(j) = slope from P to vertex j, vertices left of P.  phi is quasiconvex
// (slopes fall until the tangency vertex, then rise), so the argmin is the
// first j with phi(j+1) >= phi(j).  A small window scan guards plateau ties.
int argmin_left(const TangentScan& t, int lo, int hi) {
  int a = lo, b = hi;
  while (a < b) {
    int mid = a + (b - a) / 2;
    if (t.slope_to(mid + 1) >= t.slope_to(mid)) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  int best = a;
  double best_v = t.slope_to(a);
  for (int j = std::max(lo, a - 2); j <= std::min(hi, a + 2); ++j) {
    double v = t.slope_to(j);
    if (v < best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

// Mirror image of argmin_left: slopes to vertices right of P rise until the
// tangency vertex, then fall; the argmax is the first j with
// psi(j+1) <= psi(j).
int argmax_right(const TangentScan& t, int lo, int hi) {
  int a = lo, b = hi;
  while (a < b) {
    int mid = a + (b - a) / 2;
    if (t.slope_to(mid + 1) <= t.slope_to(mid)) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  int best = a;
  double best_v = t.slope_to(a);
  for (int j = std::max(lo, a - 2); j <= std::min(hi, a + 2); ++j) {
    double v = t.slope_to(j);
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

}  // namespace

double ConcIntResult::eval_lo(double x) const {
  const auto& act = active_;
  if (act.empty()) return -kInf;
  double x0 = grid_[act.front()], x1 = grid_[act.back()];
  if (x < x0 || x > x1) return -kInf;
  // Find the hull segment containing x.
  int lo = 0, hi = static_cast<int>(act.size()) - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (grid_[act[mid]] <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double ax = grid_[act[lo]], ay = lo_knots_[act[lo]];
  double bx = grid_[act[hi]], by = lo_knots_[act[hi]];
  if (x == ax) return ay;
  if (x == bx) return by;
  return ay + (by - ay) * (x - ax) / (bx - ax);
}

double ConcIntResult::eval_uo(double x) const {
  if (!feasible) throw std::logic_error("conc_int: eval_uo on an infeasible result");
  double best = kInf;
  const int m = static_cast<int>(grid_.size());
  for (int s = 0; s < m; ++s) {
    double us = upper_[s];
    if (!std::isfinite(us)) continue;
    if (grid_[s] <= x && !std::isnan(tangent_from_left_[s])) {
      best = std::min(best, us + tangent_from_left_[s] * (x - grid_[s]));
    }
    if (grid_[s] >= x && !std::isnan(tangent_from_right_[s])) {
      best = std::min(best, us + tangent_from_right_[s] * (x - grid_[s]));
    }
  }
  return best;
}

ConcIntResult conc_int(const std::vector<double>& grid, const std::vector<double>& lower,
                       const std::vector<double>& upper) {
  validate_grid(grid, lower.size());
  if (upper.size() != grid.size()) throw std::invalid_argument("conc_int: upper size mismatch");
  for (double u : upper) {
    if (std::isnan(u) || u == -kInf)
      throw std::invalid_argument("conc_int: input-error (upper values must exceed -inf)");
  }

  ConcIntResult res;
  res.grid_ = grid;
  res.lower_ = lower;
  res.upper_ = upper;

  LcmResult lcm = least_concave_majorant(grid, lower);
  res.lo_knots_ = std::move(lcm.majorant);
  res.active_ = std::move(lcm.active);

  res.feasible = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (res.lo_knots_[k] > upper[k] + kConcIntFeasibilityTol) {
      res.feasible = false;
      return res;
    }
  }

  const int m = static_cast<int>(grid.size());
  const auto& act = res.active_;
  std::vector<double> hx(act.size()), hy(act.size());
  for (std::size_t j = 0; j < act.size(); ++j) {
    hx[j] = grid[act[j]];
    hy[j] = res.lo_knots_[act[j]];
  }

  res.tangent_from_left_.assign(m, kNaN);
  res.tangent_from_right_.assign(m, kNaN);
  for (int s = 0; s < m; ++s) {
    if (!std::isfinite(upper[s])) continue;
    TangentScan scan{&hx, &hy, grid[s], upper[s]};
    // Vertices strictly left of s.
    int left_hi = -1;
    for (int j = static_cast<int>(act.size()) - 1; j >= 0; --j) {
      if (hx[j] < grid[s]) {
        left_hi = j;
        break;
      }
    }
    if (left_hi >= 0) {
      int j = argmin_left(scan, 0, left_hi);
      res.tangent_from_left_[s] = (upper[s] - hy[j]) / (grid[s] - hx[j]);
    }
    // Vertices strictly right of s.
    int right_lo = -1;
    for (int j = 0; j < static_cast<int>(act.size()); ++j) {
      if (hx[j] > grid[s]) {
        right_lo = j;
        break;
      }
    }
    if (right_lo >= 0) {
      int j = argmax_right(scan, right_lo, static_cast<int>(act.size()) - 1);
      res.tangent_from_right_[s] = (upper[s] - hy[j]) / (grid[s] - hx[j]);
    }
  }

  res.uo_knots_.resize(m);
  for (int k = 0; k < m; ++k) res.uo_knots_[k] = res.eval_uo(grid[k]);
  return res;
}

}  // namespace bisstar
