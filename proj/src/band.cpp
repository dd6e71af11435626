#include "bisstar/band.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bisstar/parallel.hpp"
#include "bisstar/rng.hpp"

namespace bisstar {

namespace {

double order_statistic_quantile(std::vector<double>& stats, double alpha) {
  // Conservative rounding: index ceil((1-alpha) * reps), 1-based.
  std::size_t k = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(stats.size())));
  k = std::min(std::max<std::size_t>(k, 1), stats.size());
  std::nth_element(stats.begin(), stats.begin() + (k - 1), stats.end());
  return stats[k - 1];
}

void check_quantile_args(int n, double alpha, int replications) {
  if (n < 2) throw std::invalid_argument("quantile: invalid-sample (need n >= 2)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("quantile: alpha must lie in (0, 1)");
  if (replications < 1000)
    throw std::invalid_argument("quantile: calibration-error (need >= 1000 replications)");
}

std::vector<double> sorted_uniforms(Rng& rng, int n) {
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform01();
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

double massart_bound(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("massart_bound: alpha must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / 2.0);
}

QuantileEstimate ks_quantile(int n, double alpha, int replications, std::uint64_t seed,
                             int workers) {
  check_quantile_args(n, alpha, replications);
  std::vector<double> stats(replications);
  parallel_for(static_cast<std::size_t>(replications), workers, [&](std::size_t rep) {
    Rng rng = Rng::stream(seed, rep);
    std::vector<double> u = sorted_uniforms(rng, n);
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
      double ui = u[i - 1];
      worst = std::max(worst, std::abs(ui - static_cast<double>(i) / n));
      worst = std::max(worst, std::abs(ui - static_cast<double>(i - 1) / n));
    }
    stats[rep] = std::sqrt(static_cast<double>(n)) * worst;
  });
  QuantileEstimate q;
  q.kappa = order_statistic_quantile(stats, alpha);
  q.n = n;
  q.alpha = alpha;
  q.replications = replications;
  q.seed = seed;
  q.kind = BandKind::KS;
  if (!(q.kappa > 0.0 && std::isfinite(q.kappa)))
    throw std::runtime_error("ks_quantile: calibration produced a degenerate quantile");
  return q;
}

QuantileEstimate wks_quantile(int n, double alpha, double gamma_w, int replications,
                              std::uint64_t seed, int workers) {
  check_quantile_args(n, alpha, replications);
  if (!(gamma_w >= 0.0 && gamma_w < 0.5))
    throw std::invalid_argument(
        "wks_quantile: parameter-error (weight exponent must lie in [0, 1/2))");
  std::vector<double> stats(replications);
  parallel_for(static_cast<std::size_t>(replications), workers, [&](std::size_t rep) {
    Rng rng = Rng::stream(seed, rep);
    std::vector<double> u = sorted_uniforms(rng, n);
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
      double ti = static_cast<double>(i) / (n + 1);
      double w = std::pow(ti * (1.0 - ti), gamma_w);
      worst = std::max(worst, std::abs(u[i - 1] - ti) / w);
    }
    stats[rep] = std::sqrt(static_cast<double>(n)) * worst;
  });
  QuantileEstimate q;
  q.kappa = order_statistic_quantile(stats, alpha);
  q.n = n;
  q.alpha = alpha;
  q.replications = replications;
  q.seed = seed;
  q.gamma_w = gamma_w;
  q.kind = BandKind::WKS;
  if (!(q.kappa > 0.0 && std::isfinite(q.kappa)))
    throw std::runtime_error("wks_quantile: calibration produced a degenerate quantile");
  return q;
}

void validate_band(const Band& band) {
  const auto& lk = band.lower.knots();
  const auto& uk = band.upper.knots();
  if (lk != uk) throw std::invalid_argument("band: lower/upper knot grids differ");
  const auto& lv = band.lower.values();
  const auto& uv = band.upper.values();
  const double eps = 1e-12;
  if (band.status == BandStatus::InfeasibleSentinel) {
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (lv[i].raw() != 1.0 || uv[i].raw() != 0.0)
        throw std::invalid_argument("band: sentinel must have lower == 1, upper == 0");
    }
    return;
  }
  bool lower_below_one = false, upper_above_zero = false;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    double lo = lv[i].raw(), up = uv[i].raw();
    if (!(lo >= -eps && up <= 1.0 + eps && lo <= up + eps))
      throw std::invalid_argument("band: values must satisfy 0 <= lower <= upper <= 1");
    if (i > 0 && (lo < lv[i - 1].raw() - eps || up < uv[i - 1].raw() - eps))
      throw std::invalid_argument("band: envelopes must be nondecreasing");
    if (lo < 1.0) lower_below_one = true;
    if (up > 0.0) upper_above_zero = true;
  }
  if (!lower_below_one || !upper_above_zero)
    throw std::invalid_argument("band: degenerate envelopes");
}

Band make_infeasible_sentinel(std::vector<double> grid, double alpha, BandKind kind,
                              double gamma_w, std::optional<double> s_star) {
  std::vector<XReal> ones(grid.size(), XReal(1.0));
  std::vector<XReal> zeros(grid.size(), XReal(0.0));
  Band b{
      KnotFunction(grid, ones, KnotMode::StepRightContinuous, XReal(1.0), XReal(1.0), true),
      KnotFunction(std::move(grid), zeros, KnotMode::StepRightContinuous, XReal(0.0), XReal(0.0),
                   true),
      alpha,
      BandStatus::InfeasibleSentinel,
      kind,
      gamma_w,
      s_star};
  return b;
}

Band ks_band(const SampleData& sample, double alpha, const QuantileEstimate& quantile) {
  if (quantile.n != sample.n())
    throw std::invalid_argument("ks_band: config-error (quantile n != sample n)");
  const double half_width = quantile.kappa / std::sqrt(static_cast<double>(sample.n()));
  KnotFunction cdf = empirical_cdf(sample);
  std::vector<double> knots = cdf.knots();
  std::vector<XReal> lower, upper;
  lower.reserve(knots.size());
  upper.reserve(knots.size());
  for (const XReal& v : cdf.values()) {
    lower.emplace_back(std::max(v.raw() - half_width, 0.0));
    upper.emplace_back(std::min(v.raw() + half_width, 1.0));
  }
  Band band{
      KnotFunction(knots, std::move(lower), KnotMode::StepRightContinuous, XReal(0.0),
                   XReal(std::max(1.0 - half_width, 0.0)), true),
      KnotFunction(std::move(knots), std::move(upper), KnotMode::StepRightContinuous,
                   XReal(std::min(half_width, 1.0)), XReal(1.0), true),
      alpha,
      BandStatus::Feasible,
      BandKind::KS};
  validate_band(band);
  return band;
}

Band wks_band(const SampleData& sample, double alpha, double gamma_w,
              const QuantileEstimate& quantile) {
  if (quantile.n != sample.n())
    throw std::invalid_argument("wks_band: config-error (quantile n != sample n)");
  if (quantile.kind != BandKind::WKS || quantile.gamma_w != gamma_w)
    throw std::invalid_argument("wks_band: config-error (quantile calibrated for other weights)");
  if (!(gamma_w >= 0.0 && gamma_w < 0.5))
    throw std::invalid_argument("wks_band: parameter-error (weight exponent out of range)");

  const int n = sample.n();
  const double root_n = std::sqrt(static_cast<double>(n));
  auto t = [&](int i) { return static_cast<double>(i) / (n + 1); };
  auto weight = [&](int i) { return std::pow(t(i) * (1.0 - t(i)), gamma_w); };

  // On [X_(i), X_(i+1)): lower uses the t_i term, upper the t_{i+1} term.
  // The boundary intervals keep only their defined endpoint terms: lower is
  // 0 left of the data and upper is 1 right of it.
  auto lower_at = [&](int i) {
    if (i == 0) return 0.0;
    return std::clamp(t(i) - quantile.kappa * weight(i) / root_n, 0.0, 1.0);
  };
  auto upper_at = [&](int i) {
    if (i == n) return 1.0;
    return std::clamp(t(i + 1) + quantile.kappa * weight(i + 1) / root_n, 0.0, 1.0);
  };

  // Collapse tied order statistics: the interval right of a unique value v
  // with cumulative count c is [X_(c), X_(c+1)).
  const auto& obs = sample.observations();
  std::vector<double> knots;
  std::vector<XReal> lower, upper;
  std::size_t i = 0;
  while (i < obs.size()) {
    std::size_t j = i;
    while (j + 1 < obs.size() && obs[j + 1] == obs[i]) ++j;
    int count = static_cast<int>(j + 1);
    knots.push_back(obs[i]);
    lower.emplace_back(lower_at(count));
    upper.emplace_back(upper_at(count));
    i = j + 1;
  }
  // Running maxima: the per-interval formulas are monotone for the exact
  // order-statistic grid, but tied samples can make consecutive clamped
  // values equal; enforce nondecreasing explicitly.
  for (std::size_t k = 1; k < lower.size(); ++k) {
    lower[k] = XReal(std::max(lower[k].raw(), lower[k - 1].raw()));
    upper[k] = XReal(std::max(upper[k].raw(), upper[k - 1].raw()));
  }
  Band band{
      KnotFunction(knots, std::move(lower), KnotMode::StepRightContinuous, XReal(0.0),
                   XReal(lower_at(n)), true),
      KnotFunction(std::move(knots), std::move(upper), KnotMode::StepRightContinuous,
                   XReal(upper_at(0)), XReal(1.0), true),
      alpha,
      BandStatus::Feasible,
      BandKind::WKS,
      gamma_w};
  validate_band(band);
  return band;
}

namespace {

std::string cache_key(BandKind kind, int n, double alpha, double gamma_w, int replications,
                      std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s:n=%d:alpha=%.12g:gw=%.12g:reps=%d:seed=%llu",
                kind == BandKind::KS ? "ks" : "wks", n, alpha, gamma_w, replications,
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

QuantileCache::QuantileCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  nlohmann::json j;
  in >> j;
  if (j.value("schema_version", 0) != kSchemaVersion) return;
  for (auto& [key, e] : j.at("entries").items()) {
    QuantileEstimate q;
    q.kappa = e.at("kappa").get<double>();
    q.n = e.at("n").get<int>();
    q.alpha = e.at("alpha").get<double>();
    q.replications = e.at("replications").get<int>();
    q.seed = e.at("seed").get<std::uint64_t>();
    q.gamma_w = e.at("gamma_w").get<double>();
    q.kind = e.at("kind").get<std::string>() == "ks" ? BandKind::KS : BandKind::WKS;
    entries_[key] = q;
  }
}

std::optional<QuantileEstimate> QuantileCache::lookup(BandKind kind, int n, double alpha,
                                                      double gamma_w, int replications,
                                                      std::uint64_t seed) const {
  auto it = entries_.find(cache_key(kind, n, alpha, gamma_w, replications, seed));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void QuantileCache::store(const QuantileEstimate& q) {
  entries_[cache_key(q.kind, q.n, q.alpha, q.gamma_w, q.replications, q.seed)] = q;
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [key, e] : entries_) {
    entries[key] = {{"kappa", e.kappa},
                    {"n", e.n},
                    {"alpha", e.alpha},
                    {"replications", e.replications},
                    {"seed", e.seed},
                    {"gamma_w", e.gamma_w},
                    {"kind", e.kind == BandKind::KS ? "ks" : "wks"}};
  }
  j["entries"] = entries;
  std::ofstream out(path_);
  out << j.dump(2) << "\n";
}

}  // namespace bisstar
