#include "bisstar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bisstar/parallel.hpp"
#include "bisstar/rng.hpp"
#include "bisstar/shape_analysis.hpp"

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoverageSlack = 1e-9;

std::uint64_t rep_seed(std::uint64_t seed, std::size_t n_index, std::size_t rep) {
  return Rng::stream(seed, (static_cast<std::uint64_t>(n_index) << 32) | rep).next_u64();
}

QuantileEstimate calibrate(const ExperimentConfig& cfg, int n) {
  if (cfg.band == BandKind::WKS)
    return wks_quantile(n, cfg.alpha, cfg.gamma_w, cfg.quantile_replications, cfg.seed,
                        cfg.workers);
  return ks_quantile(n, cfg.alpha, cfg.quantile_replications, cfg.seed, cfg.workers);
}

Band build_band(const ExperimentConfig& cfg, const SampleData& sample,
                const QuantileEstimate& q) {
  if (cfg.band == BandKind::WKS) return wks_band(sample, cfg.alpha, cfg.gamma_w, q);
  return ks_band(sample, cfg.alpha, q);
}

// Exact containment of a continuous F in a step band: at every knot the cdf
// must sit above the lower value and below the upper's left limit.
bool base_band_covers(const Band& band, const DistributionModel& model) {
  const auto& knots = band.lower.knots();
  for (std::size_t i = 0; i < knots.size(); ++i) {
    double F = model.cdf(knots[i]);
    if (F < band.lower.values()[i].raw() - kCoverageSlack) return false;
    if (F > band.upper.left_limit(knots[i]).raw() + kCoverageSlack) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["n_values"] = n_values;
  j["alpha"] = alpha;
  j["band"] = band == BandKind::WKS ? "wks" : "ks";
  j["gamma_w"] = gamma_w;
  j["s_stars"] = s_stars;
  j["replications"] = replications;
  j["seed"] = seed;
  j["phi_power"] = phi_power;
  j["quantile_replications"] = quantile_replications;
  j["coverage_grid"] = coverage_grid;
  j["workers"] = workers;
  j["output_path"] = output_path;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.family = j.at("family").get<std::string>();
  c.n_values = j.at("n_values").get<std::vector<int>>();
  c.alpha = j.value("alpha", 0.05);
  c.band = j.value("band", std::string("ks")) == "wks" ? BandKind::WKS : BandKind::KS;
  c.gamma_w = j.value("gamma_w", 0.0);
  c.s_stars = j.value("s_stars", std::vector<double>{});
  c.replications = j.value("replications", 200);
  c.seed = j.value("seed", std::uint64_t{1});
  c.phi_power = j.value("phi_power", 1.0);
  c.quantile_replications = j.value("quantile_replications", 20000);
  c.coverage_grid = j.value("coverage_grid", 256);
  c.workers = j.value("workers", 0);
  c.output_path = j.value("output_path", std::string());
  return c;
}

CoverageTable coverage_experiment(const ExperimentConfig& cfg) {
  if (cfg.s_stars.empty()) throw std::invalid_argument("coverage_experiment: no s* values");
  ModelPtr model = make_family(cfg.family);

  struct Outcome {
    bool base_covered = false;
    bool feasible = false;
    bool refined_covered = false;
    bool inclusion_violation = false;
    double mean_width = 0.0;
    double width_q99 = 0.0;
  };

  CoverageTable table;
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const int n = cfg.n_values[ni];
    const QuantileEstimate q = calibrate(cfg, n);

    // Coverage is checked on a fixed quantile grid of the true model plus
    // the band knots, where violations concentrate.
    std::vector<double> grid_x(cfg.coverage_grid);
    for (int j = 0; j < cfg.coverage_grid; ++j) {
      grid_x[j] = model->quantile((j + 0.5) / cfg.coverage_grid);
    }
    const double x99 = model->quantile(0.99);

    std::vector<std::vector<Outcome>> outcomes(
        cfg.replications, std::vector<Outcome>(cfg.s_stars.size()));
    parallel_for(static_cast<std::size_t>(cfg.replications), cfg.workers, [&](std::size_t rep) {
      SampleData sample = model->sample(n, rep_seed(cfg.seed, ni, rep));
      Band band = build_band(cfg, sample, q);
      bool base_cov = base_band_covers(band, *model);
      for (std::size_t si = 0; si < cfg.s_stars.size(); ++si) {
        Outcome& out = outcomes[rep][si];
        out.base_covered = base_cov;
        RefinementResult res = refine(band, ShapeParam(cfg.s_stars[si]));
        out.feasible = res.band.feasible();
        if (!out.feasible) {
          out.inclusion_violation = base_cov;
          continue;
        }
        const RefinedEnvelopes& env = *res.envelopes;
        bool covered = true;
        for (double x : grid_x) {
          double F = model->cdf(x);
          if (F < env.lower(x) - kCoverageSlack || F > env.upper(x) + kCoverageSlack) {
            covered = false;
            break;
          }
        }
        if (covered) {
          const auto& knots = res.band.lower.knots();
          for (std::size_t i = 0; i < knots.size(); ++i) {
            double F = model->cdf(knots[i]);
            if (F < res.band.lower.values()[i].raw() - kCoverageSlack ||
                F > res.band.upper.values()[i].raw() + kCoverageSlack) {
              covered = false;
              break;
            }
          }
        }
        out.refined_covered = covered;
        out.inclusion_violation = base_cov && !covered;
        double sum_w = 0.0;
        for (double x : grid_x) sum_w += env.upper(x) - env.lower(x);
        out.mean_width = sum_w / grid_x.size();
        out.width_q99 = env.upper(x99) - env.lower(x99);
      }
    });

    for (std::size_t si = 0; si < cfg.s_stars.size(); ++si) {
      CoverageRow row;
      row.n = n;
      row.s_star = cfg.s_stars[si];
      int feasible = 0, covered = 0, base_covered = 0, violations = 0;
      double mean_w = 0.0, w99 = 0.0;
      for (int rep = 0; rep < cfg.replications; ++rep) {
        const Outcome& out = outcomes[rep][si];
        base_covered += out.base_covered;
        feasible += out.feasible;
        covered += out.refined_covered;
        violations += out.inclusion_violation;
        if (out.feasible) {
          mean_w += out.mean_width;
          w99 += out.width_q99;
        }
      }
      row.base_coverage = static_cast<double>(base_covered) / cfg.replications;
      row.coverage = static_cast<double>(covered) / cfg.replications;
      row.infeasible_rate = 1.0 - static_cast<double>(feasible) / cfg.replications;
      row.mean_width = feasible > 0 ? mean_w / feasible : 0.0;
      row.width_q99 = feasible > 0 ? w99 / feasible : 0.0;
      row.inclusion_violations = violations;
      table.rows.push_back(row);
    }
  }
  return table;
}

std::string CoverageTable::to_csv() const {
  std::ostringstream out;
  out << "n,s_star,base_coverage,coverage,mean_width,width_q99,infeasible_rate,"
         "inclusion_violations\n";
  for (const auto& r : rows) {
    out << r.n << "," << format_double(r.s_star) << "," << format_double(r.base_coverage) << ","
        << format_double(r.coverage) << "," << format_double(r.mean_width) << ","
        << format_double(r.width_q99) << "," << format_double(r.infeasible_rate) << ","
        << r.inclusion_violations << "\n";
  }
  return out.str();
}

namespace {

// Worst-case functional error over monotone G between the refined envelopes:
// for phi with sign-constant derivative the extremizer is an envelope, so
// the sup equals max of the two envelope integrals.  The integrand is
// evaluated exactly (envelope evaluators), with geometric tail grids closing
// the integrals beyond the data range.
double functional_sup_error(const RefinedEnvelopes& env, const DistributionModel& model,
                            double phi_power, double lo_knot, double hi_knot) {
  std::vector<double> xs;
  const int inner = 512;
  xs.reserve(inner + 2 * 80 + 2);
  for (int j = 0; j <= inner; ++j) {
    xs.push_back(lo_knot + (hi_knot - lo_knot) * j / inner);
  }
  double step = (hi_knot - lo_knot) / inner;
  if (step <= 0.0) step = 1.0;
  for (int j = 1; j <= 80; ++j) {
    double off = step * (std::pow(1.3, j) - 1.0);
    xs.push_back(lo_knot - off);
    xs.push_back(hi_knot + off);
  }
  std::sort(xs.begin(), xs.end());

  auto phi_prime = [&](double x) {
    return phi_power == 1.0 ? 1.0 : std::pow(std::abs(x), phi_power - 1.0);
  };
  double int_low = 0.0, int_high = 0.0;
  double prev_x = xs.front();
  double prev_low = phi_prime(prev_x) * (model.cdf(prev_x) - env.lower(prev_x));
  double prev_high = phi_prime(prev_x) * (env.upper(prev_x) - model.cdf(prev_x));
  for (std::size_t j = 1; j < xs.size(); ++j) {
    double x = xs[j];
    double cdf = model.cdf(x);
    double cur_low = phi_prime(x) * (cdf - env.lower(x));
    double cur_high = phi_prime(x) * (env.upper(x) - cdf);
    double h = x - prev_x;
    int_low += 0.5 * h * (prev_low + cur_low);
    int_high += 0.5 * h * (prev_high + cur_high);
    prev_x = x;
    prev_low = cur_low;
    prev_high = cur_high;
  }
  return std::max(int_low, int_high);
}

}  // namespace

RateTable functional_error_experiment(const ExperimentConfig& cfg) {
  if (cfg.s_stars.size() != 1)
    throw std::invalid_argument("functional_error_experiment: exactly one s* expected");
  const double s_star = cfg.s_stars.front();
  if (!(s_star < 0.0))
    throw std::invalid_argument("functional_error_experiment: needs s* < 0");
  if (!(cfg.phi_power < -1.0 / s_star))
    throw std::invalid_argument(
        "functional_error_experiment: divergent-functional (needs k < -1/s*)");
  ModelPtr model = make_family(cfg.family);

  RateTable table;
  std::vector<double> log_n, log_err;
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const int n = cfg.n_values[ni];
    const QuantileEstimate q = calibrate(cfg, n);
    std::vector<double> errors(cfg.replications);
    parallel_for(static_cast<std::size_t>(cfg.replications), cfg.workers, [&](std::size_t rep) {
      SampleData sample = model->sample(n, rep_seed(cfg.seed, ni, rep));
      Band band = build_band(cfg, sample, q);
      RefinementResult res = refine(band, ShapeParam(s_star));
      if (!res.band.feasible()) {
        errors[rep] = kInf;
        return;
      }
      const auto& knots = res.band.lower.knots();
      errors[rep] =
          functional_sup_error(*res.envelopes, *model, cfg.phi_power, knots.front(), knots.back());
    });
    RateRow row;
    row.n = n;
    int infeasible = 0;
    for (double e : errors) infeasible += std::isinf(e);
    row.infeasible_rate = static_cast<double>(infeasible) / cfg.replications;
    row.median_error = median_of(errors);
    table.rows.push_back(row);
    if (std::isfinite(row.median_error) && row.median_error > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n)));
      log_err.push_back(std::log(row.median_error));
    }
  }

  // Least-squares slope of log median error against log n.
  if (log_n.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_err[i];
    }
    mx /= log_n.size();
    my /= log_n.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mx) * (log_err[i] - my);
      sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    table.fitted_slope = sxy / sxx;
  }
  return table;
}

std::string RateTable::to_csv() const {
  std::ostringstream out;
  out << "n,median_error,infeasible_rate,fitted_slope\n";
  for (const auto& r : rows) {
    out << r.n << "," << format_double(r.median_error) << "," << format_double(r.infeasible_rate)
        << "," << format_double(fitted_slope) << "\n";
  }
  return out.str();
}

int mode_count(const DistributionModel& model, double half_span, int points) {
  int modes = 0;
  int last_sign = 0;
  for (int j = 0; j < points; ++j) {
    double x = -half_span + 2.0 * half_span * j / (points - 1);
    double d = model.pdf_deriv(x);
    int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign > 0 && sign < 0) ++modes;
    last_sign = sign;
  }
  return modes;
}

double threshold_search(const std::function<ModelPtr(double)>& family_at,
                        ThresholdCriterion criterion, double s_star, double lo, double hi,
                        double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("threshold_search: tol must be positive");
  if (lo == hi) return lo;
  if (!(lo < hi)) throw std::invalid_argument("threshold_search: bracket must satisfy lo <= hi");
  auto predicate = [&](double delta) {
    ModelPtr m = family_at(delta);
    if (criterion == ThresholdCriterion::BiSstarFeasibility)
      return check_bi_sstar(*m, s_star).holds;
    return mode_count(*m, delta + 6.0) <= 1;
  };
  if (!predicate(lo) || predicate(hi))
    throw std::invalid_argument(
        "threshold_search: predicate must hold at lo and fail at hi (monotone bracket)");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (predicate(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bisstar
