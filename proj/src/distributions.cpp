#include "bisstar/distributions.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bisstar/rng.hpp"

namespace bisstar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("parameter-error: ") + what);
  return v;
}

/// Bisection for the quantile of mixtures: monotone cdf, bracket from the
/// component quantiles.
double quantile_by_bisection(const DistributionModel& model, double p, double lo, double hi) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
  while (model.cdf(lo) > p) lo = lo - 2.0 * (hi - lo + 1.0);
  while (model.cdf(hi) < p) hi = hi + 2.0 * (hi - lo + 1.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (model.cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

class StudentT final : public DistributionModel {
 public:
  explicit StudentT(double r) : r_(require_positive(r, "student_t needs r > 0")), dist_(r) {
    meta_.s0 = -1.0 / (1.0 + r);
    meta_.s0_star = -1.0 / r;
  }
  double cdf(double x) const override { return boost::math::cdf(dist_, x); }
  double pdf(double x) const override { return boost::math::pdf(dist_, x); }
  double pdf_deriv(double x) const override {
    return -pdf(x) * (r_ + 1.0) * x / (r_ + x * x);
  }
  double quantile(double p) const override { return boost::math::quantile(dist_, p); }
  SupportInterval support() const override { return {-kInf, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "student_t:r=" << r_;
    return s.str();
  }

 private:
  double r_;
  boost::math::students_t_distribution<double> dist_;
};

class FDist final : public DistributionModel {
 public:
  FDist(double a, double b)
      : a_(require_positive(a, "f_dist needs a > 0")),
        b_(require_positive(b, "f_dist needs b > 0")),
        dist_(a, b) {
    if (a >= 2.0 && b >= 2.0) {
      meta_.s0 = -1.0 / (1.0 + b / 2.0);
      meta_.s0_star = -2.0 / b;
    }
  }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : boost::math::cdf(dist_, x); }
  double pdf(double x) const override { return x <= 0.0 ? 0.0 : boost::math::pdf(dist_, x); }
  double pdf_deriv(double x) const override {
    if (x <= 0.0) return 0.0;
    // f(x) = C x^{a/2-1} (1 + (a/b) x)^{-(a+b)/2}
    double p = a_ / 2.0 - 1.0;
    double c = a_ / b_;
    double q = (a_ + b_) / 2.0;
    return pdf(x) * (p / x - q * c / (1.0 + c * x));
  }
  double quantile(double p) const override { return boost::math::quantile(dist_, p); }
  SupportInterval support() const override { return {0.0, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "f_dist:a=" << a_ << ",b=" << b_;
    return s.str();
  }

 private:
  double a_, b_;
  boost::math::fisher_f_distribution<double> dist_;
};

class Pareto final : public DistributionModel {
 public:
  Pareto(double a, double b)
      : a_(require_positive(a, "pareto needs a > 0")),
        b_(require_positive(b, "pareto needs b > 0")) {
    meta_.s0 = -1.0 / (1.0 + a_);
    meta_.s0_star = -1.0 / a_;
  }
  double cdf(double x) const override {
    if (x <= b_) return 0.0;
    return 1.0 - std::pow(x / b_, -a_);
  }
  double pdf(double x) const override {
    if (x <= b_) return 0.0;
    return (a_ / b_) * std::pow(x / b_, -a_ - 1.0);
  }
  double pdf_deriv(double x) const override {
    if (x <= b_) return 0.0;
    return -pdf(x) * (a_ + 1.0) / x;
  }
  double quantile(double p) const override {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("pareto quantile: p out of range");
    return b_ * std::pow(1.0 - p, -1.0 / a_);
  }
  SupportInterval support() const override { return {b_, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "pareto:a=" << a_ << ",b=" << b_;
    return s.str();
  }

 private:
  double a_, b_;
};

// Density C_r (1 - x^2/r)^{r/2} on [-sqrt(r), sqrt(r)]; equivalently
// X = sqrt(r) (2B - 1) with B ~ Beta(r/2 + 1, r/2 + 1).
class SymmetricBeta final : public DistributionModel {
 public:
  explicit SymmetricBeta(double r)
      : r_(require_positive(r, "symmetric_beta needs r > 0")),
        half_width_(std::sqrt(r)),
        beta_(r / 2.0 + 1.0, r / 2.0 + 1.0) {
    meta_.s0 = 2.0 / r_;
    meta_.s0_star = 2.0 / (2.0 + r_);
    log_c_ = std::lgamma((3.0 + r_) / 2.0) - 0.5 * std::log(M_PI * r_) -
             std::lgamma(1.0 + r_ / 2.0);
  }
  double cdf(double x) const override {
    if (x <= -half_width_) return 0.0;
    if (x >= half_width_) return 1.0;
    return boost::math::cdf(beta_, (1.0 + x / half_width_) / 2.0);
  }
  double pdf(double x) const override {
    if (x <= -half_width_ || x >= half_width_) return 0.0;
    return std::exp(log_c_ + (r_ / 2.0) * std::log1p(-x * x / r_));
  }
  double pdf_deriv(double x) const override {
    if (x <= -half_width_ || x >= half_width_) return 0.0;
    return -x * std::exp(log_c_ + (r_ / 2.0 - 1.0) * std::log1p(-x * x / r_));
  }
  double quantile(double p) const override {
    return half_width_ * (2.0 * boost::math::quantile(beta_, p) - 1.0);
  }
  SupportInterval support() const override { return {-half_width_, half_width_}; }
  std::string name() const override {
    std::ostringstream s;
    s << "symmetric_beta:r=" << r_;
    return s.str();
  }

 private:
  double r_;
  double half_width_;
  double log_c_;
  boost::math::beta_distribution<double> beta_;
};

// f_t(x) = exp(t x - K(t)) on [0, 1] with K(t) = log((e^t - 1)/t), K(0) = 0.
class TiltedUniform final : public DistributionModel {
 public:
  explicit TiltedUniform(double t) : t_(t) {
    if (!std::isfinite(t)) throw std::invalid_argument("parameter-error: tilted_uniform t");
    meta_.s0 = 0.0;
    meta_.s0_star = std::exp(-std::abs(t));
    k_ = t == 0.0 ? 0.0 : std::log(std::expm1(std::abs(t))) - std::log(std::abs(t));
    // K(t) is even in sign flips of the formula above only through |t|;
    // recompute exactly for t < 0: K(t) = log(1 - e^t) - log(-t).
    if (t < 0.0) k_ = std::log(-std::expm1(t)) - std::log(-t);
  }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (t_ == 0.0) return x;
    return std::expm1(t_ * x) / std::expm1(t_);
  }
  double pdf(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(t_ * x - k_);
  }
  double pdf_deriv(double x) const override {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return t_ * pdf(x);
  }
  double quantile(double p) const override {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("tilted_uniform quantile");
    if (t_ == 0.0) return p;
    return std::log1p(p * std::expm1(t_)) / t_;
  }
  SupportInterval support() const override { return {0.0, 1.0}; }
  std::string name() const override {
    std::ostringstream s;
    s << "tilted_uniform:t=" << t_;
    return s.str();
  }

 private:
  double t_;
  double k_;
};

class GaussianMixture final : public DistributionModel {
 public:
  explicit GaussianMixture(double delta)
      : delta_(require_positive(delta, "gaussian_mixture needs delta > 0")), normal_(0.0, 1.0) {}
  double cdf(double x) const override {
    return 0.5 * (boost::math::cdf(normal_, x - delta_) + boost::math::cdf(normal_, x + delta_));
  }
  double pdf(double x) const override {
    return 0.5 * (boost::math::pdf(normal_, x - delta_) + boost::math::pdf(normal_, x + delta_));
  }
  double pdf_deriv(double x) const override {
    auto dphi = [&](double y) { return -y * boost::math::pdf(normal_, y); };
    return 0.5 * (dphi(x - delta_) + dphi(x + delta_));
  }
  double quantile(double p) const override {
    double lo = boost::math::quantile(normal_, p) - delta_;
    double hi = boost::math::quantile(normal_, p) + delta_;
    return quantile_by_bisection(*this, p, lo, hi);
  }
  SupportInterval support() const override { return {-kInf, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "gaussian_mixture:delta=" << delta_;
    return s.str();
  }
  SampleData sample(int n, std::uint64_t seed) const override;

 private:
  double delta_;
  boost::math::normal_distribution<double> normal_;
};

class TMixture final : public DistributionModel {
 public:
  explicit TMixture(double delta)
      : delta_(require_positive(delta, "t_mixture needs delta > 0")) {}
  double cdf(double x) const override {
    return 0.5 * (cauchy_cdf(x - delta_) + cauchy_cdf(x + delta_));
  }
  double pdf(double x) const override {
    return 0.5 * (cauchy_pdf(x - delta_) + cauchy_pdf(x + delta_));
  }
  double pdf_deriv(double x) const override {
    auto dpdf = [](double y) {
      double d = 1.0 + y * y;
      return -2.0 * y / (M_PI * d * d);
    };
    return 0.5 * (dpdf(x - delta_) + dpdf(x + delta_));
  }
  double quantile(double p) const override {
    double base = std::tan(M_PI * (p - 0.5));
    return quantile_by_bisection(*this, p, base - delta_, base + delta_);
  }
  SupportInterval support() const override { return {-kInf, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "t_mixture:delta=" << delta_;
    return s.str();
  }
  SampleData sample(int n, std::uint64_t seed) const override;

 private:
  static double cauchy_cdf(double y) { return 0.5 + std::atan(y) / M_PI; }
  static double cauchy_pdf(double y) { return 1.0 / (M_PI * (1.0 + y * y)); }
  double delta_;
};

// First passage time of standard Brownian motion to level a:
// F_a(t) = erfc(a / sqrt(2 t)), f_a(t) = a / sqrt(2 pi t^3) exp(-a^2 / (2t)).
class Levy final : public DistributionModel {
 public:
  explicit Levy(double a) : a_(require_positive(a, "levy needs a > 0")) {
    meta_.s0 = -2.0 / 3.0;
    meta_.s0_star = -2.0;
  }
  double cdf(double t) const override {
    if (t <= 0.0) return 0.0;
    return boost::math::erfc(a_ / std::sqrt(2.0 * t));
  }
  double pdf(double t) const override {
    if (t <= 0.0) return 0.0;
    return a_ / std::sqrt(2.0 * M_PI * t * t * t) * std::exp(-a_ * a_ / (2.0 * t));
  }
  double pdf_deriv(double t) const override {
    if (t <= 0.0) return 0.0;
    return pdf(t) * (a_ * a_ / (2.0 * t * t) - 1.5 / t);
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("levy quantile: p out of range");
    double z = boost::math::erfc_inv(p);
    return a_ * a_ / (2.0 * z * z);
  }
  SupportInterval support() const override { return {0.0, kInf}; }
  std::string name() const override {
    std::ostringstream s;
    s << "levy:a=" << a_;
    return s.str();
  }

 private:
  double a_;
};

std::vector<double> mixture_sample(const std::function<double(double)>& q_minus,
                                   const std::function<double(double)>& q_plus, int n,
                                   std::uint64_t seed) {
  // Component selection and component draws use split seeded streams.
  Rng pick = Rng::stream(seed, 1);
  Rng draw = Rng::stream(seed, 2);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    bool left = pick.uniform01() < 0.5;
    double u = draw.uniform01();
    xs[i] = left ? q_minus(u) : q_plus(u);
  }
  return xs;
}

SampleData GaussianMixture::sample(int n, std::uint64_t seed) const {
  boost::math::normal_distribution<double> normal(0.0, 1.0);
  double d = delta_;
  auto qm = [&, d](double u) { return boost::math::quantile(normal, u) - d; };
  auto qp = [&, d](double u) { return boost::math::quantile(normal, u) + d; };
  return SampleData(mixture_sample(qm, qp, n, seed));
}

SampleData TMixture::sample(int n, std::uint64_t seed) const {
  double d = delta_;
  auto qm = [d](double u) { return std::tan(M_PI * (u - 0.5)) - d; };
  auto qp = [d](double u) { return std::tan(M_PI * (u - 0.5)) + d; };
  return SampleData(mixture_sample(qm, qp, n, seed));
}

}  // namespace

bool SupportInterval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

SampleData DistributionModel::sample(int n, std::uint64_t seed) const {
  if (n < 2) throw std::invalid_argument("sample: need n >= 2");
  Rng rng(seed);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = quantile(rng.uniform01());
  return SampleData(std::move(xs));
}

ModelPtr make_student_t(double r) { return std::make_shared<StudentT>(r); }
ModelPtr make_f_dist(double a, double b) { return std::make_shared<FDist>(a, b); }
ModelPtr make_pareto(double a, double b) { return std::make_shared<Pareto>(a, b); }
ModelPtr make_symmetric_beta(double r) { return std::make_shared<SymmetricBeta>(r); }
ModelPtr make_tilted_uniform(double t) { return std::make_shared<TiltedUniform>(t); }
ModelPtr make_gaussian_mixture(double delta) { return std::make_shared<GaussianMixture>(delta); }
ModelPtr make_t_mixture(double delta) { return std::make_shared<TMixture>(delta); }
ModelPtr make_levy(double a) { return std::make_shared<Levy>(a); }

ModelPtr make_family(const std::string& spec) {
  auto colon = spec.find(':');
  std::string family = spec.substr(0, colon);
  std::map<std::string, double> args;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("family spec: expected key=value in '" + spec + "'");
      args[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  auto arg = [&](const char* key) {
    auto it = args.find(key);
    if (it == args.end())
      throw std::invalid_argument(std::string("family spec: missing parameter '") + key + "'");
    return it->second;
  };
  if (family == "student_t") return make_student_t(arg("r"));
  if (family == "f_dist") return make_f_dist(arg("a"), arg("b"));
  if (family == "pareto") return make_pareto(arg("a"), arg("b"));
  if (family == "symmetric_beta") return make_symmetric_beta(arg("r"));
  if (family == "tilted_uniform") return make_tilted_uniform(arg("t"));
  if (family == "gaussian_mixture") return make_gaussian_mixture(arg("delta"));
  if (family == "t_mixture") return make_t_mixture(arg("delta"));
  if (family == "levy") return make_levy(arg("a"));
  throw std::invalid_argument("family spec: unknown family '" + family + "'");
}

}  // namespace bisstar
