#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bisstar/band.hpp"
#include "bisstar/distributions.hpp"
#include "bisstar/refine.hpp"

namespace bisstar {

struct ExperimentConfig {
  std::string family;            // family spec string
  std::vector<int> n_values;
  double alpha = 0.05;
  BandKind band = BandKind::KS;
  double gamma_w = 0.0;
  std::vector<double> s_stars;
  int replications = 200;
  std::uint64_t seed = 1;
  double phi_power = 1.0;        // functional phi has phi'(x) = |x|^{k-1}
  int quantile_replications = 20000;
  int coverage_grid = 256;       // probability points for coverage checks
  int workers = 0;               // 0 = hardware concurrency
  std::string output_path;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

struct CoverageRow {
  int n = 0;
  double s_star = 0.0;
  double coverage = 0.0;          // refined-band coverage of the true F
  double base_coverage = 0.0;     // unrefined band coverage
  double mean_width = 0.0;        // mean refined width over the quantile grid
  double width_q99 = 0.0;         // refined width at the 0.99 quantile
  double infeasible_rate = 0.0;
  int inclusion_violations = 0;   // replications where refinement lost a covered F
};

struct CoverageTable {
  std::vector<CoverageRow> rows;
  std::string to_csv() const;
};

CoverageTable coverage_experiment(const ExperimentConfig& config);

struct RateRow {
  int n = 0;
  double median_error = 0.0;
  double infeasible_rate = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;  // least-squares slope of log median error vs log n
  std::string to_csv() const;
};

/// Worst-case error of the linear functional with phi'(x) = |x|^{k-1} over
/// all distribution functions between the refined envelopes, computed as
/// max of the two envelope integrals; medians per n and log-log slope.
RateTable functional_error_experiment(const ExperimentConfig& config);

enum class ThresholdCriterion { BiSstarFeasibility, Unimodality };

/// Bisection on the family parameter delta for a monotone predicate: either
/// feasibility of check_bi_sstar at s_star, or unimodality of the density.
/// The predicate must hold at lo and fail at hi (checked).  A degenerate
/// bracket returns lo.
double threshold_search(const std::function<ModelPtr(double)>& family_at,
                        ThresholdCriterion criterion, double s_star, double lo, double hi,
                        double tol);

/// Number of local maxima of the density, counted as down-crossings of the
/// derivative sign along a dense symmetric grid.
int mode_count(const DistributionModel& model, double half_span, int points = 20001);

}  // namespace bisstar
