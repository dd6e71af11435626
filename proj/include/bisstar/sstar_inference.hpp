#pragma once

#include <utility>
#include <vector>

#include "bisstar/band.hpp"
#include "bisstar/refine.hpp"

namespace bisstar {

/// Data-driven inference for the shape parameter from a single band.
struct SstarEstimate {
  double s_bar = 0.0;              // feasibility upper confidence bound
  double s_hat = 0.0;              // threshold estimator (valid iff defined)
  bool s_hat_defined = false;
  double rho = 0.0;
  double alpha = 0.0;
  std::vector<std::pair<double, double>> omega_curve;  // sampled (s*, omega)
};

struct SstarConfig {
  double s_tol = 1e-3;        // bisection resolution in s*
  double search_span = 64.0;  // the s_hat search is clipped to [s_bar - span, s_bar]
  RefineConfig refine;
  int curve_points = 20;      // omega curve samples reported alongside
};

/// Largest s* (within tol) at which some bi-s*-concave distribution function
/// fits inside the band, found by bisection on refine-feasibility (valid
/// because feasibility is monotone in s*).  The interval (-inf, result] is a
/// >= (1-alpha) confidence set for the true shape index.  Returns -inf when
/// the band is infeasible at every probed s*.
double sstar_upper(const Band& band, double tol = 1e-3, RefineConfig config = {});

/// Fraction of data points at which the empirical cdf lies inside the
/// refined band at s_star (zero when the refinement is infeasible).
double omega(const Band& band, const SampleData& sample, double s_star,
             RefineConfig config = {});

/// Computes s_bar and the threshold estimator: the location of the crossing
/// where omega drops through rho, resolved by bisection over s*.  (Read as a
/// set, {s* <= s_bar : omega(s*) > rho} is a left half-line because omega is
/// nonincreasing; the estimator is the right edge of that half-line.)
SstarEstimate estimate_sstar(const Band& band, const SampleData& sample, double rho,
                             SstarConfig config = {});

}  // namespace bisstar
