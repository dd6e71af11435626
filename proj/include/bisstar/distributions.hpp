#pragma once

#include <memory>
#include <optional>
#include <string>

#include "bisstar/knot_function.hpp"

namespace bisstar {

struct SupportInterval {
  double lo;
  double hi;
  bool bounded() const;
};

/// Shape metadata carried by the analytic families: the density concavity
/// index s0 (f^{s0} convex/concave) and the distribution-function index
/// s0* = sup{s* : F is bi-s*-concave}, when known in closed form.
struct FamilyMetadata {
  std::optional<double> s0;
  std::optional<double> s0_star;
  std::optional<double> gamma_bar() const {
    if (!s0_star) return std::nullopt;
    return 1.0 - *s0_star;
  }
};

/// Analytic one-dimensional distribution with closed-form cdf, density,
/// density derivative and quantile.  Models are immutable; samplers take
/// explicit seeds and use inverse transforms, so draws are deterministic.
class DistributionModel {
 public:
  virtual ~DistributionModel() = default;

  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  virtual double pdf_deriv(double x) const = 0;
  virtual double quantile(double p) const = 0;
  virtual SupportInterval support() const = 0;
  virtual std::string name() const = 0;

  const FamilyMetadata& metadata() const { return meta_; }

  virtual SampleData sample(int n, std::uint64_t seed) const;

 protected:
  FamilyMetadata meta_;
};

using ModelPtr = std::shared_ptr<const DistributionModel>;

ModelPtr make_student_t(double r);
ModelPtr make_f_dist(double a, double b);
ModelPtr make_pareto(double a, double b);
ModelPtr make_symmetric_beta(double r);
ModelPtr make_tilted_uniform(double t);
ModelPtr make_gaussian_mixture(double delta);
ModelPtr make_t_mixture(double delta);
ModelPtr make_levy(double a);

/// Parses family spec strings like "student_t:r=1", "pareto:a=2,b=1",
/// "gaussian_mixture:delta=1.8".
ModelPtr make_family(const std::string& spec);

}  // namespace bisstar
