#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "bisstar/knot_function.hpp"

namespace bisstar {

enum class BandKind { KS, WKS, Refined };
enum class BandStatus { Feasible, InfeasibleSentinel };

/// Monte Carlo estimate of the (1-alpha) quantile of a band statistic.
struct QuantileEstimate {
  double kappa = 0.0;
  int n = 0;
  double alpha = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
  double gamma_w = 0.0;  // weight exponent, WKS only
  BandKind kind = BandKind::KS;
};

/// Paired lower/upper envelopes of a confidence band.  The infeasible
/// sentinel (lower identically 1, upper identically 0) signals that no
/// bi-s*-concave distribution function fits inside the band.
struct Band {
  KnotFunction lower;
  KnotFunction upper;
  double alpha = 0.0;
  BandStatus status = BandStatus::Feasible;
  BandKind kind = BandKind::KS;
  double gamma_w = 0.0;                 // WKS weight exponent
  std::optional<double> s_star;         // set for refined bands

  bool feasible() const { return status == BandStatus::Feasible; }
};

/// Throws unless the band satisfies its invariants: for feasible bands,
/// 0 <= lower <= upper <= 1 at all knots, both nondecreasing, lower < 1
/// somewhere and upper > 0 somewhere; for the sentinel, lower == 1 and
/// upper == 0 everywhere.
void validate_band(const Band& band);

Band make_infeasible_sentinel(std::vector<double> grid, double alpha, BandKind kind,
                              double gamma_w = 0.0, std::optional<double> s_star = std::nullopt);

double massart_bound(double alpha);

QuantileEstimate ks_quantile(int n, double alpha, int replications, std::uint64_t seed,
                             int workers = 0);
QuantileEstimate wks_quantile(int n, double alpha, double gamma_w, int replications,
                              std::uint64_t seed, int workers = 0);

Band ks_band(const SampleData& sample, double alpha, const QuantileEstimate& quantile);
Band wks_band(const SampleData& sample, double alpha, double gamma_w,
              const QuantileEstimate& quantile);

/// JSON-file cache of quantile estimates keyed by
/// (kind, n, alpha, gamma_w, replications, seed).
class QuantileCache {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit QuantileCache(std::string path);  // loads the file if it exists

  std::optional<QuantileEstimate> lookup(BandKind kind, int n, double alpha, double gamma_w,
                                         int replications, std::uint64_t seed) const;
  void store(const QuantileEstimate& estimate);  // inserts and writes back

 private:
  std::string path_;
  std::map<std::string, QuantileEstimate> entries_;
};

}  // namespace bisstar
