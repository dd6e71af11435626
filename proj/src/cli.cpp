#include "bisstar/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bisstar/band.hpp"
#include "bisstar/distributions.hpp"
#include "bisstar/experiments.hpp"
#include "bisstar/io.hpp"
#include "bisstar/refine.hpp"
#include "bisstar/shape_analysis.hpp"
#include "bisstar/sstar_inference.hpp"

namespace bisstar {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct DataOptions {
  std::string input_csv;
  std::string family;
  int n = 0;
  std::uint64_t data_seed = 1;
};

struct BandOptions {
  std::string kind = "ks";
  double alpha = 0.05;
  double gamma_w = 0.0;
  int reps = 50000;
  std::uint64_t seed = 1;
  std::string quantile_cache;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  auto* input = cmd->add_option("--input", d.input_csv, "CSV file with one numeric column");
  auto* family = cmd->add_option("--family", d.family, "family spec, e.g. student_t:r=1");
  cmd->add_option("--n", d.n, "sample size when sampling from a family");
  cmd->add_option("--data-seed", d.data_seed, "seed for family sampling");
  input->excludes(family);
}

void add_band_options(CLI::App* cmd, BandOptions& b) {
  cmd->add_option("--band", b.kind, "band kind: ks or wks")
      ->check(CLI::IsMember({"ks", "wks"}));
  cmd->add_option("--alpha", b.alpha, "band level alpha");
  cmd->add_option("--gamma-w", b.gamma_w, "weight exponent for wks bands");
  cmd->add_option("--reps", b.reps, "Monte Carlo replications for the quantile");
  cmd->add_option("--seed", b.seed, "Monte Carlo seed for the quantile");
  cmd->add_option("--quantile-cache", b.quantile_cache, "JSON quantile cache file");
}

SampleData load_sample(const DataOptions& d) {
  if (!d.input_csv.empty()) return ingest_csv_file(d.input_csv);
  if (d.family.empty())
    throw std::invalid_argument("exactly one input source required (--input or --family)");
  if (d.n < 2) throw std::invalid_argument("--n must be at least 2 when sampling a family");
  return make_family(d.family)->sample(d.n, d.data_seed);
}

QuantileEstimate get_quantile(const BandOptions& b, int n) {
  BandKind kind = b.kind == "wks" ? BandKind::WKS : BandKind::KS;
  double gw = kind == BandKind::WKS ? b.gamma_w : 0.0;
  std::optional<QuantileCache> cache;
  if (!b.quantile_cache.empty()) {
    cache.emplace(b.quantile_cache);
    if (auto hit = cache->lookup(kind, n, b.alpha, gw, b.reps, b.seed)) return *hit;
  }
  QuantileEstimate q = kind == BandKind::WKS
                           ? wks_quantile(n, b.alpha, gw, b.reps, b.seed)
                           : ks_quantile(n, b.alpha, b.reps, b.seed);
  if (cache) cache->store(q);
  return q;
}

Band build_band(const BandOptions& b, const SampleData& sample) {
  QuantileEstimate q = get_quantile(b, sample.n());
  if (b.kind == "wks") return wks_band(sample, b.alpha, b.gamma_w, q);
  return ks_band(sample, b.alpha, q);
}

fs::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("BISSTAR_OUTPUT_DIR")) return env;
  return ".";
}

void write_file(const fs::path& path, const std::string& content, std::ostream& log) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  out << content;
  log << "wrote " << path.string() << "\n";
}

/// Dense evaluation grid: 512 points spanning the data range extended by
/// three interquartile ranges on each side, so refined tail behavior is
/// visible in plots.
std::vector<double> dense_grid(const SampleData& sample, int points = 512) {
  const auto& obs = sample.observations();
  double q1 = obs[static_cast<std::size_t>(0.25 * (obs.size() - 1))];
  double q3 = obs[static_cast<std::size_t>(0.75 * (obs.size() - 1))];
  double iqr = std::max(q3 - q1, 1e-12);
  double lo = obs.front() - 3.0 * iqr;
  double hi = obs.back() + 3.0 * iqr;
  std::vector<double> xs(points);
  for (int j = 0; j < points; ++j) xs[j] = lo + (hi - lo) * j / (points - 1);
  return xs;
}

std::string band_grid_csv(const Band& band, const std::vector<double>& xs) {
  std::ostringstream out;
  out << "x,lower,upper\n";
  for (double x : xs) {
    out << fmt(x) << "," << fmt(band.lower.evaluate(x).raw()) << ","
        << fmt(band.upper.evaluate(x).raw()) << "\n";
  }
  return out.str();
}

std::string refined_grid_csv(const RefinedEnvelopes& env, const std::vector<double>& xs) {
  std::ostringstream out;
  out << "x,lower,upper\n";
  for (double x : xs) {
    out << fmt(x) << "," << fmt(env.lower(x)) << "," << fmt(env.upper(x)) << "\n";
  }
  return out.str();
}

ordered_json band_report(const Band& band, const QuantileEstimate* q) {
  ordered_json j;
  j["kind"] = band.kind == BandKind::KS ? "ks" : (band.kind == BandKind::WKS ? "wks" : "refined");
  j["alpha"] = band.alpha;
  j["feasible"] = band.feasible();
  if (band.kind == BandKind::WKS) j["gamma_w"] = band.gamma_w;
  if (band.s_star) j["s_star"] = *band.s_star;
  if (q) {
    j["kappa"] = q->kappa;
    j["quantile"] = {{"replications", q->replications}, {"seed", q->seed}, {"n", q->n}};
  }
  return j;
}

ordered_json base_report(const std::string& command) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  return j;
}

int cmd_band(const DataOptions& d, const BandOptions& b, const std::string& out_flag,
             std::ostream& out) {
  SampleData sample = load_sample(d);
  QuantileEstimate q = get_quantile(b, sample.n());
  Band band = b.kind == "wks" ? wks_band(sample, b.alpha, b.gamma_w, q)
                              : ks_band(sample, b.alpha, q);
  fs::path dir = output_dir(out_flag);
  ordered_json report = base_report("band");
  report["n"] = sample.n();
  report["ties"] = sample.tie_count();
  report["band"] = band_report(band, &q);
  write_file(dir / "band.json", report.dump(2) + "\n", out);
  write_file(dir / "band_grid.csv", band_grid_csv(band, dense_grid(sample)), out);
  return 0;
}

int cmd_refine(const DataOptions& d, const BandOptions& b, double s_star, double tol,
               int max_iter, const std::string& out_flag, std::ostream& out) {
  SampleData sample = load_sample(d);
  QuantileEstimate q = get_quantile(b, sample.n());
  Band band = b.kind == "wks" ? wks_band(sample, b.alpha, b.gamma_w, q)
                              : ks_band(sample, b.alpha, q);
  RefinementResult res = refine(band, ShapeParam(s_star), RefineConfig{tol, max_iter});

  fs::path dir = output_dir(out_flag);
  ordered_json report = base_report("refine");
  report["n"] = sample.n();
  report["s_star"] = s_star;
  report["band"] = band_report(band, &q);
  report["feasible"] = res.band.feasible();
  report["iterations"] = res.iterations;
  report["converged"] = res.converged;
  report["last_change"] = res.last_change;
  if (!res.band.feasible()) {
    report["conclusion"] = "not bi-s*-concave at level alpha";
  }
  write_file(dir / "refined_band.json", report.dump(2) + "\n", out);
  std::ostringstream knot_json;
  knot_json << "{\n\"lower\": " << res.band.lower.to_json()
            << ",\n\"upper\": " << res.band.upper.to_json() << "\n}\n";
  write_file(dir / "refined_knots.json", knot_json.str(), out);
  if (res.band.feasible()) {
    write_file(dir / "refined_grid.csv", refined_grid_csv(*res.envelopes, dense_grid(sample)),
               out);
    return 0;
  }
  return 1;
}

int cmd_check(const std::string& family, double s_star, int grid_points,
              const std::string& out_flag, std::ostream& out) {
  ModelPtr model = make_family(family);
  GridSpec grid;
  if (grid_points > 0) grid.points = grid_points;
  ShapeReport rep = check_bi_sstar(*model, s_star, grid);
  ordered_json j = base_report("check");
  j["family"] = model->name();
  j["s_star"] = rep.s_star;
  j["holds"] = rep.holds;
  j["worst_margin"] = rep.worst_margin;
  j["witness_x"] = rep.witness_x;
  j["hazard_holds"] = rep.hazard_holds;
  write_file(output_dir(out_flag) / "check.json", j.dump(2) + "\n", out);
  return 0;
}

int cmd_cr(const std::string& family, int grid_points, const std::string& out_flag,
           std::ostream& out) {
  ModelPtr model = make_family(family);
  GridSpec grid;
  if (grid_points > 0) grid.points = grid_points;
  CrReport rep = cr_constants(*model, grid);
  ordered_json j = base_report("cr");
  j["family"] = model->name();
  j["gamma_tilde"] = rep.gamma_tilde;
  j["gamma"] = rep.gamma;
  j["gamma_bar"] = rep.gamma_bar;
  j["cr_of_cdf"] = rep.cr_of_cdf;
  j["cr_of_survival"] = rep.cr_of_survival;
  j["grid"] = rep.grid_description;
  write_file(output_dir(out_flag) / "cr.json", j.dump(2) + "\n", out);
  return 0;
}

int cmd_max_sstar(const std::string& family, double tol, const std::string& out_flag,
                  std::ostream& out) {
  ModelPtr model = make_family(family);
  double s = max_sstar(*model, tol);
  ordered_json j = base_report("max-sstar");
  j["family"] = model->name();
  j["max_s_star"] = std::isfinite(s) ? ordered_json(s) : ordered_json("-inf");
  j["tol"] = tol;
  write_file(output_dir(out_flag) / "max_sstar.json", j.dump(2) + "\n", out);
  return 0;
}

int cmd_estimate(const DataOptions& d, const BandOptions& b, double rho, double s_tol,
                 const std::string& out_flag, std::ostream& out) {
  SampleData sample = load_sample(d);
  QuantileEstimate q = get_quantile(b, sample.n());
  Band band = b.kind == "wks" ? wks_band(sample, b.alpha, b.gamma_w, q)
                              : ks_band(sample, b.alpha, q);
  SstarConfig cfg;
  cfg.s_tol = s_tol;
  SstarEstimate est = estimate_sstar(band, sample, rho, cfg);

  ordered_json j = base_report("estimate-sstar");
  j["n"] = sample.n();
  j["band"] = band_report(band, &q);
  j["rho"] = est.rho;
  j["s_bar"] = std::isfinite(est.s_bar) ? ordered_json(est.s_bar) : ordered_json("-inf");
  if (est.s_hat_defined) {
    j["s_hat"] = est.s_hat;
  } else {
    j["s_hat"] = nullptr;
    j["note"] = "estimator-undefined: omega never exceeds rho below s_bar";
  }
  ordered_json curve = ordered_json::array();
  for (auto [s, w] : est.omega_curve) curve.push_back({{"s_star", s}, {"omega", w}});
  j["omega_curve"] = curve;
  fs::path dir = output_dir(out_flag);
  write_file(dir / "estimate_sstar.json", j.dump(2) + "\n", out);
  std::ostringstream csv;
  csv << "s_star,omega\n";
  for (auto [s, w] : est.omega_curve) csv << fmt(s) << "," << fmt(w) << "\n";
  write_file(dir / "omega_curve.csv", csv.str(), out);
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& kind,
                 const std::string& out_flag, std::ostream& out) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("simulate: cannot open config '" + config_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = ExperimentConfig::from_json(buf.str());
  fs::path dir = output_dir(out_flag);
  std::string table_csv;
  if (kind == "coverage") {
    table_csv = coverage_experiment(cfg).to_csv();
  } else if (kind == "rate") {
    table_csv = functional_error_experiment(cfg).to_csv();
  } else {
    throw std::invalid_argument("simulate: --kind must be coverage or rate");
  }
  std::string name = cfg.output_path.empty() ? (kind + "_table.csv") : cfg.output_path;
  write_file(dir / name, table_csv, out);
  return 0;
}

int cmd_threshold(const std::string& family, const std::string& criterion, double s_star,
                  double lo, double hi, double tol, const std::string& out_flag,
                  std::ostream& out) {
  std::function<ModelPtr(double)> family_at;
  if (family == "gaussian_mixture") {
    family_at = [](double d) { return make_gaussian_mixture(d); };
  } else if (family == "t_mixture") {
    family_at = [](double d) { return make_t_mixture(d); };
  } else {
    throw std::invalid_argument("threshold: family must be gaussian_mixture or t_mixture");
  }
  ThresholdCriterion crit = criterion == "unimodal" ? ThresholdCriterion::Unimodality
                                                    : ThresholdCriterion::BiSstarFeasibility;
  double delta = threshold_search(family_at, crit, s_star, lo, hi, tol);
  ordered_json j = base_report("threshold");
  j["family"] = family;
  j["criterion"] = criterion;
  j["s_star"] = s_star;
  j["threshold"] = delta;
  j["tol"] = tol;
  write_file(output_dir(out_flag) / "threshold.json", j.dump(2) + "\n", out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"shape-constrained confidence bands for distribution functions"};
  app.set_version_flag("--version", std::string("bisstar ") + kCliVersion +
                                        " (quantile cache schema " +
                                        std::to_string(QuantileCache::kSchemaVersion) + ")");

  std::string out_dir;
  app.add_option("--out", out_dir, "output directory (default: $BISSTAR_OUTPUT_DIR or .)");

  DataOptions data;
  BandOptions band_opts;
  double s_star = 0.0, tol = 1e-10, rho = 0.95, s_tol = 1e-3;
  double th_lo = 0.0, th_hi = 0.0, th_tol = 1e-3;
  int max_iter = 200, grid_points = 0;
  std::string family, criterion = "bisstar", sim_config, sim_kind = "coverage";

  auto* band_cmd = app.add_subcommand("band", "build an unconstrained confidence band");
  add_data_options(band_cmd, data);
  add_band_options(band_cmd, band_opts);

  auto* refine_cmd = app.add_subcommand("refine", "refine a band under bi-s*-concavity");
  add_data_options(refine_cmd, data);
  add_band_options(refine_cmd, band_opts);
  refine_cmd->add_option("--s-star", s_star, "shape parameter s* <= 1")->required();
  refine_cmd->add_option("--tol", tol, "fixed-point sup-norm tolerance");
  refine_cmd->add_option("--max-iter", max_iter, "iteration cap");

  auto* check_cmd = app.add_subcommand("check", "verify bi-s*-concavity of a family");
  check_cmd->add_option("--family", family, "family spec")->required();
  check_cmd->add_option("--s-star", s_star, "shape parameter")->required();
  check_cmd->add_option("--grid-points", grid_points, "probability grid size");

  auto* cr_cmd = app.add_subcommand("cr", "quantile-process constants of a family");
  cr_cmd->add_option("--family", family, "family spec")->required();
  cr_cmd->add_option("--grid-points", grid_points, "probability grid size");

  auto* max_cmd = app.add_subcommand("max-sstar", "largest feasible s* of a family");
  max_cmd->add_option("--family", family, "family spec")->required();
  max_cmd->add_option("--tol", s_tol, "bisection tolerance");

  auto* est_cmd = app.add_subcommand("estimate-sstar", "infer s* from data");
  add_data_options(est_cmd, data);
  add_band_options(est_cmd, band_opts);
  est_cmd->add_option("--rho", rho, "containment threshold in (0,1)");
  est_cmd->add_option("--s-tol", s_tol, "bisection tolerance in s*");

  auto* sim_cmd = app.add_subcommand("simulate", "run a configured experiment");
  sim_cmd->add_option("--config", sim_config, "experiment config JSON")->required();
  sim_cmd->add_option("--kind", sim_kind, "coverage or rate")
      ->check(CLI::IsMember({"coverage", "rate"}));

  auto* th_cmd = app.add_subcommand("threshold", "bisect a family parameter threshold");
  th_cmd->add_option("--family", family, "gaussian_mixture or t_mixture")->required();
  th_cmd->add_option("--criterion", criterion, "bisstar or unimodal")
      ->check(CLI::IsMember({"bisstar", "unimodal"}));
  th_cmd->add_option("--s-star", s_star, "shape parameter for the bisstar criterion");
  th_cmd->add_option("--lo", th_lo, "bracket lower end")->required();
  th_cmd->add_option("--hi", th_hi, "bracket upper end")->required();
  th_cmd->add_option("--tol", th_tol, "bisection tolerance");

  app.require_subcommand(0, 1);

  std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 expects reversed args
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (band_cmd->parsed()) return cmd_band(data, band_opts, out_dir, out);
    if (refine_cmd->parsed())
      return cmd_refine(data, band_opts, s_star, tol, max_iter, out_dir, out);
    if (check_cmd->parsed()) return cmd_check(family, s_star, grid_points, out_dir, out);
    if (cr_cmd->parsed()) return cmd_cr(family, grid_points, out_dir, out);
    if (max_cmd->parsed()) return cmd_max_sstar(family, s_tol, out_dir, out);
    if (est_cmd->parsed()) return cmd_estimate(data, band_opts, rho, s_tol, out_dir, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim_config, sim_kind, out_dir, out);
    if (th_cmd->parsed())
      return cmd_threshold(family, criterion, s_star, th_lo, th_hi, th_tol, out_dir, out);
    out << app.help();
    return 0;
  } catch (const CsvError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bisstar
