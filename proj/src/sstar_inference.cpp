#include "bisstar/sstar_inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbeFloor = -65536.0;  // -2^16

bool feasible_at(const Band& band, double s_star, const RefineConfig& config) {
  return refine(band, ShapeParam(s_star), config).band.feasible();
}

}  // namespace

double sstar_upper(const Band& band, double tol, RefineConfig config) {
  if (!(tol > 0.0)) throw std::invalid_argument("sstar_upper: tol must be positive");
  if (!band.feasible()) return -kInf;
  if (feasible_at(band, 1.0, config)) return 1.0;
  double hi = 1.0;  // known infeasible
  double lo = -1.0;
  while (!feasible_at(band, lo, config)) {
    hi = lo;
    lo *= 2.0;
    if (lo < kProbeFloor) return -kInf;
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (feasible_at(band, mid, config)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;  // largest value verified feasible
}

double omega(const Band& band, const SampleData& sample, double s_star, RefineConfig config) {
  RefinementResult res = refine(band, ShapeParam(s_star), config);
  if (!res.band.feasible()) return 0.0;
  KnotFunction cdf = empirical_cdf(sample);
  const auto& lower = res.band.lower;
  const auto& upper = res.band.upper;
  int inside = 0;
  for (double xi : sample.observations()) {
    double fn = cdf.evaluate(xi).raw();
    double lo = lower.evaluate(xi).raw();
    double up = upper.evaluate(xi).raw();
    if (lo <= fn && fn <= up) ++inside;
  }
  return static_cast<double>(inside) / sample.n();
}

SstarEstimate estimate_sstar(const Band& band, const SampleData& sample, double rho,
                             SstarConfig config) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("estimate_sstar: rho must lie in (0, 1)");

  SstarEstimate est;
  est.rho = rho;
  est.alpha = band.alpha;
  est.s_bar = sstar_upper(band, config.s_tol, config.refine);
  if (est.s_bar == -kInf) return est;

  auto omega_at = [&](double s) { return omega(band, sample, s, config.refine); };

  // omega is nonincreasing in s*, equal to 1 for very negative s* whenever
  // the empirical cdf sits inside the original band, and 0 above s_bar.  The
  // estimator is the crossing point where omega drops through rho; ties
  // (omega == rho) count as below threshold per the strict inequality.
  double lo = est.s_bar - config.search_span;
  double lo_omega = omega_at(lo);
  est.omega_curve.emplace_back(lo, lo_omega);
  if (!(lo_omega > rho)) return est;  // estimator-undefined, reported not thrown

  double hi = est.s_bar;
  double hi_omega = omega_at(hi);
  est.omega_curve.emplace_back(hi, hi_omega);
  if (hi_omega > rho) {
    est.s_hat = est.s_bar;
    est.s_hat_defined = true;
  } else {
    while (hi - lo > config.s_tol) {
      double mid = 0.5 * (lo + hi);
      double w = omega_at(mid);
      est.omega_curve.emplace_back(mid, w);
      if (w > rho) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    est.s_hat = lo;  // largest probe with omega above the threshold
    est.s_hat_defined = true;
  }

  // Evenly sampled curve over the search range for reporting.
  if (config.curve_points > 1) {
    double span_lo = est.s_bar - config.search_span;
    for (int k = 0; k < config.curve_points; ++k) {
      double s = span_lo + (est.s_bar - span_lo) * k / (config.curve_points - 1);
      est.omega_curve.emplace_back(s, omega_at(s));
    }
  }
  std::sort(est.omega_curve.begin(), est.omega_curve.end());
  est.omega_curve.erase(std::unique(est.omega_curve.begin(), est.omega_curve.end(),
                                    [](const auto& a, const auto& b) { return a.first == b.first; }),
                        est.omega_curve.end());
  return est;
}

}  // namespace bisstar
