#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bisstar/xreal.hpp"

namespace bisstar {

enum class KnotMode { StepRightContinuous, PiecewiseLinear };

enum class TiePolicy { Keep, CollapseToUnique };

/// Sorted i.i.d. sample with n >= 2 observations.  Ties are allowed in the
/// observations; the tie policy controls how knot grids derived from the
/// sample treat them (the default collapses tied values to one knot).
class SampleData {
 public:
  SampleData(std::vector<double> observations, TiePolicy policy = TiePolicy::CollapseToUnique);

  const std::vector<double>& observations() const { return obs_; }
  int n() const { return static_cast<int>(obs_.size()); }
  TiePolicy tie_policy() const { return policy_; }
  int tie_count() const { return ties_; }

  /// Strictly increasing unique observation values.
  std::vector<double> unique_values() const;

 private:
  std::vector<double> obs_;
  TiePolicy policy_;
  int ties_ = 0;
};

/// Monotone piecewise function on a strictly increasing knot grid with
/// extended-real values.  Step mode is right-continuous; linear mode
/// interpolates between finite knot values.  Outside the knot range the
/// function takes the constant tail values.
class KnotFunction {
 public:
  KnotFunction(std::vector<double> knots, std::vector<XReal> values, KnotMode mode,
               XReal left_tail, XReal right_tail, bool monotone_nondecreasing = false);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<XReal>& values() const { return values_; }
  KnotMode mode() const { return mode_; }
  XReal left_tail() const { return left_tail_; }
  XReal right_tail() const { return right_tail_; }
  bool monotone() const { return monotone_; }
  int size() const { return static_cast<int>(knots_.size()); }

  XReal evaluate(double x) const;
  XReal operator()(double x) const { return evaluate(x); }

  /// Value approached from the left at x (for step mode, the value of the
  /// interval ending at x; for linear mode equal to evaluate(x)).
  XReal left_limit(double x) const;

  std::string to_csv() const;
  static KnotFunction from_csv(std::istream& in, KnotMode mode, XReal left_tail, XReal right_tail,
                               bool monotone = false);

  std::string to_json() const;
  static KnotFunction from_json(const std::string& text);

 private:
  std::vector<double> knots_;
  std::vector<XReal> values_;
  KnotMode mode_;
  XReal left_tail_;
  XReal right_tail_;
  bool monotone_;
};

/// Empirical distribution function of the sample as a right-continuous step
/// function: value i/n just right of the i-th order statistic, tails 0 and 1.
KnotFunction empirical_cdf(const SampleData& sample);

}  // namespace bisstar
