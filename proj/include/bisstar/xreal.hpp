#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bisstar {

/// Extended real number: a double that may be +/-infinity but never NaN.
///
/// Comparisons give the usual total order with -inf < x < +inf.  Arithmetic
/// follows the monotone-limit rules for infinities; any operation that would
/// produce an indeterminate form (inf - inf, 0 * inf, inf / inf, 0 / 0)
/// throws std::domain_error instead of yielding a silent NaN.
class XReal {
 public:
  XReal() = default;
  XReal(double v) : v_(v) {
    if (std::isnan(v)) throw std::domain_error("XReal: NaN is not an extended real");
  }

  static XReal inf() { return XReal(std::numeric_limits<double>::infinity()); }
  static XReal neg_inf() { return XReal(-std::numeric_limits<double>::infinity()); }

  double raw() const { return v_; }
  bool finite() const { return std::isfinite(v_); }
  bool is_inf() const { return std::isinf(v_) && v_ > 0; }
  bool is_neg_inf() const { return std::isinf(v_) && v_ < 0; }

  friend bool operator==(XReal a, XReal b) { return a.v_ == b.v_; }
  friend bool operator!=(XReal a, XReal b) { return a.v_ != b.v_; }
  friend bool operator<(XReal a, XReal b) { return a.v_ < b.v_; }
  friend bool operator<=(XReal a, XReal b) { return a.v_ <= b.v_; }
  friend bool operator>(XReal a, XReal b) { return a.v_ > b.v_; }
  friend bool operator>=(XReal a, XReal b) { return a.v_ >= b.v_; }

  friend XReal operator-(XReal a) { return XReal(-a.v_); }
  friend XReal operator+(XReal a, XReal b) { return checked(a.v_ + b.v_, "addition"); }
  friend XReal operator-(XReal a, XReal b) { return checked(a.v_ - b.v_, "subtraction"); }
  friend XReal operator*(XReal a, XReal b) { return checked(a.v_ * b.v_, "multiplication"); }
  friend XReal operator/(XReal a, XReal b) { return checked(a.v_ / b.v_, "division"); }

 private:
  static XReal checked(double v, const char* op) {
    if (std::isnan(v)) {
      throw std::domain_error(std::string("XReal: indeterminate form in ") + op);
    }
    XReal r;
    r.v_ = v;
    return r;
  }

  double v_ = 0.0;
};

}  // namespace bisstar
