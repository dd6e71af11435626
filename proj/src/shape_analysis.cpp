#include "bisstar/shape_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCheckTol = 1e-7;     // relative slack for inequality (iv)
constexpr double kSstarFloor = -65536; // -2^16; below this report -inf

struct ShapeGrid {
  std::vector<double> x, cdf, pdf, pdf_deriv;
};

ShapeGrid probability_grid(const DistributionModel& model, int points, int tail_points) {
  if (points < 8) throw std::invalid_argument("grid: need at least 8 points");
  std::vector<double> ps;
  ps.reserve(points + 2 * std::max(tail_points, 0));
  const double eps = 1.0 / (points + 1);
  for (int j = std::max(tail_points, 0); j >= 1; --j) ps.push_back(eps * std::ldexp(1.0, -j));
  for (int k = 1; k <= points; ++k) ps.push_back(static_cast<double>(k) * eps);
  for (int j = 1; j <= std::max(tail_points, 0); ++j) ps.push_back(1.0 - eps * std::ldexp(1.0, -j));

  ShapeGrid g;
  g.x.reserve(ps.size());
  g.cdf.reserve(ps.size());
  g.pdf.reserve(ps.size());
  g.pdf_deriv.reserve(ps.size());
  for (double p : ps) {
    double x = model.quantile(p);
    if (!std::isfinite(x))
      throw std::runtime_error("grid-error: quantile left the support interior");
    double F = model.cdf(x);
    double f = model.pdf(x);
    if (!(F > 0.0 && F < 1.0 && f > 0.0))
      throw std::runtime_error("grid-error: grid point hit a support endpoint");
    g.x.push_back(x);
    g.cdf.push_back(F);
    g.pdf.push_back(f);
    g.pdf_deriv.push_back(model.pdf_deriv(x));
  }
  return g;
}

// Scaled slack of the two inequalities in the derivative characterization at
// one grid point.  Positive means satisfied with room; the scale f^2 /
// min(F, 1-F) keeps tail blow-ups comparable.
double scaled_margin(const ShapeGrid& g, std::size_t k, double s_star) {
  double F = g.cdf[k], f = g.pdf[k], fp = g.pdf_deriv[k];
  double scale = f * f / std::min(F, 1.0 - F);
  double right = (1.0 - s_star) * f * f / F - fp;
  double left = fp + (1.0 - s_star) * f * f / (1.0 - F);
  return std::min(right, left) / scale;
}

bool inequality_holds(const ShapeGrid& g, double s_star) {
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    if (scaled_margin(g, k, s_star) < -kCheckTol) return false;
  }
  return true;
}

bool hazards_monotone(const ShapeGrid& g, double s_star) {
  // s*-hazard f/(1-F)^{1-s*} nondecreasing, reverse s*-hazard f/F^{1-s*}
  // nonincreasing; compared in log space with relative slack.
  double prev_h = -kInf, prev_r = kInf;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    double lf = std::log(g.pdf[k]);
    double h = lf - (1.0 - s_star) * std::log1p(-g.cdf[k]);
    double r = lf - (1.0 - s_star) * std::log(g.cdf[k]);
    if (h < prev_h - kCheckTol || r > prev_r + kCheckTol) return false;
    prev_h = h;
    prev_r = r;
  }
  return true;
}

}  // namespace

ShapeReport check_bi_sstar(const DistributionModel& model, double s_star, GridSpec grid) {
  if (!(s_star <= 1.0)) throw std::invalid_argument("check_bi_sstar: s* must be <= 1");
  ShapeGrid g = probability_grid(model, grid.points, 0);
  ShapeReport report;
  report.s_star = s_star;
  report.worst_margin = kInf;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    double m = scaled_margin(g, k, s_star);
    if (m < report.worst_margin) {
      report.worst_margin = m;
      report.witness_x = g.x[k];
    }
  }
  report.holds = report.worst_margin >= -kCheckTol;
  report.hazard_holds = hazards_monotone(g, s_star);
  return report;
}

CrReport cr_constants(const DistributionModel& model, GridSpec grid) {
  ShapeGrid g = probability_grid(model, grid.points, grid.tail_points);
  CrReport r;
  r.gamma_tilde = 0.0;
  r.gamma = 0.0;
  r.cr_of_cdf = -kInf;
  r.cr_of_survival = -kInf;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    double F = g.cdf[k], f = g.pdf[k], fp = g.pdf_deriv[k];
    double base = fp / (f * f);
    r.gamma_tilde = std::max(r.gamma_tilde, F * (1.0 - F) * std::abs(base));
    r.gamma = std::max(r.gamma, std::min(F, 1.0 - F) * std::abs(base));
    r.cr_of_cdf = std::max(r.cr_of_cdf, F * base);
    r.cr_of_survival = std::max(r.cr_of_survival, (1.0 - F) * -base);
  }
  r.gamma_bar = std::max(r.cr_of_cdf, r.cr_of_survival);
  std::ostringstream desc;
  desc << "probability-equispaced, " << grid.points << " interior points, " << grid.tail_points
       << " geometric points per tail, range [" << g.x.front() << ", " << g.x.back() << "]";
  r.grid_description = desc.str();
  return r;
}

namespace {

double pow_plus(double z, double e) {
  if (z <= 0.0) return e < 0.0 ? kInf : 0.0;
  return std::pow(z, e);
}

}  // namespace

std::pair<double, double> tail_bounds(const DistributionModel& model, double s_star, double x,
                                      double y) {
  if (!(s_star <= 1.0)) throw std::invalid_argument("tail_bounds: s* must be <= 1");
  double F = model.cdf(x);
  if (!(F > 0.0 && F < 1.0))
    throw std::invalid_argument("tail_bounds: anchor x must lie inside J(F)");
  double f = model.pdf(x);
  double upper, lower;
  if (s_star == 0.0) {
    upper = F * std::exp(f / F * (y - x));
    lower = 1.0 - (1.0 - F) * std::exp(-f / (1.0 - F) * (y - x));
  } else {
    upper = F * pow_plus(1.0 + s_star * (f / F) * (y - x), 1.0 / s_star);
    lower = 1.0 - (1.0 - F) * pow_plus(1.0 - s_star * (f / (1.0 - F)) * (y - x), 1.0 / s_star);
  }
  return {std::min(upper, 1.0), std::max(lower, 0.0)};
}

std::pair<double, double> global_envelopes(const DistributionModel& model, double s_star,
                                           double x) {
  if (!(s_star <= 1.0)) throw std::invalid_argument("global_envelopes: s* must be <= 1");
  double F = model.cdf(x);
  if (s_star == 0.0) {
    double lo = F > 0.0 ? 1.0 + std::log(F) : -kInf;
    double up = F < 1.0 ? -std::log1p(-F) : kInf;
    return {lo, up};
  }
  double lo = (std::pow(F, s_star) - (1.0 - s_star)) / s_star;
  double up = (1.0 - std::pow(1.0 - F, s_star)) / s_star;
  return {lo, up};
}

double max_sstar(const DistributionModel& model, double tol, GridSpec grid) {
  if (!(tol > 0.0)) throw std::invalid_argument("max_sstar: tol must be positive");
  ShapeGrid g = probability_grid(model, grid.points, 0);
  auto holds = [&](double s) { return inequality_holds(g, s); };

  if (holds(1.0)) return 1.0;
  double hi = 1.0;  // known to fail
  double lo = 0.0;
  if (!holds(lo)) {
    hi = 0.0;
    lo = -1.0;
    while (!holds(lo)) {
      hi = lo;
      lo *= 2.0;
      if (lo < kSstarFloor) return -kInf;
    }
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double moment_exponent_bound(double s_star, SupportInterval support) {
  if (support.bounded()) return kInf;
  if (!(s_star < 0.0))
    throw std::invalid_argument(
        "moment_exponent_bound: needs s* < 0 unless the support is bounded");
  return -1.0 / s_star;
}

bool check_definition_direct(const DistributionModel& model, double s_star, GridSpec grid) {
  if (!(s_star <= 1.0)) throw std::invalid_argument("check_definition_direct: s* must be <= 1");
  ShapeGrid g = probability_grid(model, grid.points, 0);
  ShapeParam s(s_star);
  // Transformed values of F and of the survival function; for s* < 0 both
  // must be convex (slopes nondecreasing), otherwise concave.
  std::vector<double> y1(g.x.size()), y2(g.x.size());
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    if (s_star == 0.0) {
      y1[k] = std::log(g.cdf[k]);
      y2[k] = std::log1p(-g.cdf[k]);
    } else {
      y1[k] = std::pow(g.cdf[k], s_star);
      y2[k] = std::pow(1.0 - g.cdf[k], s_star);
    }
  }
  const bool want_convex = s_star < 0.0;
  auto shape_ok = [&](const std::vector<double>& y) {
    for (std::size_t k = 2; k < y.size(); ++k) {
      double s1 = (y[k - 1] - y[k - 2]) / (g.x[k - 1] - g.x[k - 2]);
      double s2 = (y[k] - y[k - 1]) / (g.x[k] - g.x[k - 1]);
      double tolerance = 1e-6 * (std::abs(s1) + std::abs(s2) + 1e-300);
      if (want_convex ? (s2 < s1 - tolerance) : (s2 > s1 + tolerance)) return false;
    }
    return true;
  };
  return shape_ok(y1) && shape_ok(y2);
}

}  // namespace bisstar
