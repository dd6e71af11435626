#include "bisstar/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BandValues {
  std::vector<double> grid;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Step bands are represented conservatively on the knot grid: the lower
// envelope contributes its left limit and the upper its right-continuous
// value, so no distribution function admitted by the step band is excluded.
// Linear-mode bands contribute their knot values directly.
BandValues effective_values(const Band& band) {
  BandValues v;
  v.grid = band.lower.knots();
  v.lower.reserve(v.grid.size());
  v.upper.reserve(v.grid.size());
  const bool step = band.lower.mode() == KnotMode::StepRightContinuous;
  for (std::size_t i = 0; i < v.grid.size(); ++i) {
    double lo = step ? band.lower.left_limit(v.grid[i]).raw() : band.lower.values()[i].raw();
    double up = band.upper.values()[i].raw();
    v.lower.push_back(lo);
    v.upper.push_back(up);
  }
  return v;
}

struct PassOutcome {
  bool feasible = true;
  bool applied = false;  // false when too few finite constraints to tighten
  std::optional<ConcIntResult> state;
};

// One concave-interpolation pass over (low, high) in place.  For the
// survival pass the caller hands in (1-U, 1-L) and flips the results back.
// Knots whose upper value is 0 (or transforms to -inf after saturation) are
// excluded: there the constraint is vacuous because any admitted G is flat.
// Those knots can only form a contiguous run at the grid edge since the
// envelopes are monotone.
PassOutcome concavity_pass(const std::vector<double>& grid, std::vector<double>& low,
                           std::vector<double>& high, ShapeParam s, bool survival) {
  const std::size_t m = grid.size();
  std::vector<int> idx;
  std::vector<double> sub_grid, l_in, u_in;
  idx.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    double wl = survival ? 1.0 - high[i] : low[i];
    double wh = survival ? 1.0 - low[i] : high[i];
    wl = std::clamp(wl, 0.0, 1.0);
    wh = std::clamp(wh, 0.0, 1.0);
    if (wh <= 0.0) continue;
    XReal gu = transform_g(wh, s);
    if (gu.is_neg_inf()) continue;
    idx.push_back(static_cast<int>(i));
    sub_grid.push_back(grid[i]);
    l_in.push_back(transform_g(wl, s).raw());
    u_in.push_back(gu.raw());
  }

  int finite_lower = 0;
  for (double l : l_in) {
    if (l > -kInf) ++finite_lower;
  }
  PassOutcome out;
  if (finite_lower < 2) return out;  // nothing to tighten against

  ConcIntResult ci = conc_int(sub_grid, l_in, u_in);
  if (!ci.feasible) {
    out.feasible = false;
    return out;
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double lo_v = inverse_h_clamped(XReal(ci.lo_at_knots()[k]), s);
    double hi_v = inverse_h_clamped(XReal(ci.uo_at_knots()[k]), s);
    if (lo_v > hi_v) lo_v = hi_v;  // feasibility tolerance can cross them by ~1e-9
    std::size_t i = static_cast<std::size_t>(idx[k]);
    if (survival) {
      low[i] = 1.0 - hi_v;
      high[i] = 1.0 - lo_v;
    } else {
      low[i] = lo_v;
      high[i] = hi_v;
    }
  }
  out.applied = true;
  out.state = std::move(ci);
  return out;
}

void enforce_monotone(std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) {
      if (v[i] < v[i - 1] - 1e-9)
        throw std::logic_error("refine: envelope lost monotonicity");
      v[i] = v[i - 1];
    }
  }
}

Band assemble_band(const Band& original, ShapeParam s, const BandValues& v) {
  std::vector<XReal> lower, upper;
  lower.reserve(v.grid.size());
  upper.reserve(v.grid.size());
  for (std::size_t i = 0; i < v.grid.size(); ++i) {
    lower.emplace_back(v.lower[i]);
    upper.emplace_back(v.upper[i]);
  }
  Band band{
      KnotFunction(v.grid, std::move(lower), KnotMode::PiecewiseLinear, XReal(0.0),
                   XReal(v.lower.back()), true),
      KnotFunction(v.grid, std::move(upper), KnotMode::PiecewiseLinear, XReal(v.upper.front()),
                   XReal(1.0), true),
      original.alpha,
      BandStatus::Feasible,
      BandKind::Refined,
      original.gamma_w,
      s.value()};
  return band;
}

}  // namespace

double RefinedEnvelopes::lower(double x) const {
  double best = 0.0;
  if (cdf_side_) {
    best = std::max(best, inverse_h_clamped(XReal(cdf_side_->eval_lo(x)), s_));
  }
  if (survival_side_) {
    best = std::max(best, 1.0 - inverse_h_clamped(XReal(survival_side_->eval_uo(x)), s_));
  }
  return std::clamp(best, 0.0, 1.0);
}

double RefinedEnvelopes::upper(double x) const {
  double best = 1.0;
  if (cdf_side_) {
    best = std::min(best, inverse_h_clamped(XReal(cdf_side_->eval_uo(x)), s_));
  }
  if (survival_side_) {
    best = std::min(best, 1.0 - inverse_h_clamped(XReal(survival_side_->eval_lo(x)), s_));
  }
  return std::clamp(best, 0.0, 1.0);
}

Band refine_once(const Band& band, ShapeParam s, const std::vector<double>& grid) {
  if (!band.feasible()) return band;
  if (grid != band.lower.knots())
    throw std::invalid_argument("refine_once: grid must match the band's knots");
  BandValues v = effective_values(band);
  PassOutcome a = concavity_pass(v.grid, v.lower, v.upper, s, /*survival=*/false);
  if (!a.feasible)
    return make_infeasible_sentinel(v.grid, band.alpha, BandKind::Refined, band.gamma_w,
                                    s.value());
  PassOutcome b = concavity_pass(v.grid, v.lower, v.upper, s, /*survival=*/true);
  if (!b.feasible)
    return make_infeasible_sentinel(v.grid, band.alpha, BandKind::Refined, band.gamma_w,
                                    s.value());
  enforce_monotone(v.lower);
  enforce_monotone(v.upper);
  return assemble_band(band, s, v);
}

RefinementResult refine(const Band& band, ShapeParam s, RefineConfig config) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("refine: tol must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("refine: max_iter must be >= 1");

  RefinementResult result{band, 0, false, 0.0, std::nullopt};
  if (!band.feasible()) {
    result.converged = true;
    return result;
  }

  BandValues v = effective_values(band);
  std::optional<ConcIntResult> last_a, last_b;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    std::vector<double> prev_low = v.lower, prev_high = v.upper;
    PassOutcome a = concavity_pass(v.grid, v.lower, v.upper, s, /*survival=*/false);
    if (!a.feasible) {
      result.band = make_infeasible_sentinel(v.grid, band.alpha, BandKind::Refined, band.gamma_w,
                                             s.value());
      result.iterations = iter;
      result.converged = true;
      return result;
    }
    PassOutcome b = concavity_pass(v.grid, v.lower, v.upper, s, /*survival=*/true);
    if (!b.feasible) {
      result.band = make_infeasible_sentinel(v.grid, band.alpha, BandKind::Refined, band.gamma_w,
                                             s.value());
      result.iterations = iter;
      result.converged = true;
      return result;
    }
    if (a.state) last_a = std::move(a.state);
    if (b.state) last_b = std::move(b.state);

    double change = 0.0;
    for (std::size_t i = 0; i < v.grid.size(); ++i) {
      change = std::max(change, std::abs(v.lower[i] - prev_low[i]));
      change = std::max(change, std::abs(v.upper[i] - prev_high[i]));
    }
    result.iterations = iter;
    result.last_change = change;
    if (change <= config.tol) {
      result.converged = true;
      break;
    }
  }

  enforce_monotone(v.lower);
  enforce_monotone(v.upper);
  result.band = assemble_band(band, s, v);
  result.envelopes = RefinedEnvelopes(s, std::move(last_a), std::move(last_b));
  return result;
}

LipschitzBound lipschitz_constants(double a, double b, double u, double v, ShapeParam s) {
  if (!(a < b)) throw std::invalid_argument("lipschitz_constants: need a < b");
  if (!(0.0 < u && u < v && v < 1.0))
    throw std::invalid_argument("lipschitz_constants: need 0 < u < v < 1");
  LipschitzBound out;
  double ss = s.value();
  if (ss == 0.0) {
    out.gamma1 = (std::log(v) - std::log(u)) / (b - a);
    out.gamma2 = (std::log(1.0 - u) - std::log(1.0 - v)) / (b - a);
  } else {
    out.gamma1 = (std::pow(v, ss) - std::pow(u, ss)) / (ss * (b - a));
    out.gamma2 = -(std::pow(1.0 - v, ss) - std::pow(1.0 - u, ss)) / (ss * (b - a));
  }
  return out;
}

}  // namespace bisstar
