#include "bisstar/knot_function.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bisstar {

namespace {

std::string format_value(XReal v) {
  if (v.is_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v.raw());
  return buf;
}

double parse_value(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = std::stod(tok, &pos);
  if (pos != tok.size()) throw std::invalid_argument("grid csv: bad numeric token '" + tok + "'");
  return v;
}

}  // namespace

SampleData::SampleData(std::vector<double> observations, TiePolicy policy)
    : obs_(std::move(observations)), policy_(policy) {
  if (obs_.size() < 2) throw std::invalid_argument("SampleData: need at least two observations");
  for (double x : obs_) {
    if (!std::isfinite(x)) throw std::invalid_argument("SampleData: observations must be finite");
  }
  std::sort(obs_.begin(), obs_.end());
  for (std::size_t i = 1; i < obs_.size(); ++i) {
    if (obs_[i] == obs_[i - 1]) ++ties_;
  }
}

std::vector<double> SampleData::unique_values() const {
  std::vector<double> u(obs_);
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

KnotFunction::KnotFunction(std::vector<double> knots, std::vector<XReal> values, KnotMode mode,
                           XReal left_tail, XReal right_tail, bool monotone_nondecreasing)
    : knots_(std::move(knots)),
      values_(std::move(values)),
      mode_(mode),
      left_tail_(left_tail),
      right_tail_(right_tail),
      monotone_(monotone_nondecreasing) {
  if (knots_.size() < 1) throw std::invalid_argument("KnotFunction: need at least one knot");
  if (knots_.size() != values_.size())
    throw std::invalid_argument("KnotFunction: knots/values size mismatch");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]))
      throw std::invalid_argument("KnotFunction: knots must be finite");
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      throw std::invalid_argument("KnotFunction: knots must be strictly increasing");
  }
  if (monotone_) {
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (values_[i] < values_[i - 1])
        throw std::invalid_argument("KnotFunction: values not nondecreasing");
    }
  }
}

XReal KnotFunction::evaluate(double x) const {
  if (x < knots_.front()) return left_tail_;
  if (x > knots_.back()) return right_tail_;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  // i is the first knot strictly greater than x, so x lies in [knots[i-1], knots[i]).
  if (mode_ == KnotMode::StepRightContinuous) return values_[i - 1];
  if (x == knots_[i - 1]) return values_[i - 1];
  if (i == knots_.size()) return values_.back();
  XReal a = values_[i - 1];
  XReal b = values_[i];
  if (!a.finite() || !b.finite())
    throw std::domain_error("KnotFunction: undefined interpolation against an infinite value");
  double t = (x - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
  return XReal(a.raw() + t * (b.raw() - a.raw()));
}

XReal KnotFunction::left_limit(double x) const {
  if (x <= knots_.front()) return left_tail_;
  if (mode_ == KnotMode::PiecewiseLinear) return evaluate(x);
  if (x > knots_.back()) return right_tail_;
  auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (i < knots_.size() && knots_[i] == x) {
    return i == 0 ? left_tail_ : values_[i - 1];
  }
  return values_[i - 1];
}

std::string KnotFunction::to_csv() const {
  std::ostringstream out;
  out << "x,value\n";
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", knots_[i]);
    out << buf << "," << format_value(values_[i]) << "\n";
  }
  return out.str();
}

KnotFunction KnotFunction::from_csv(std::istream& in, KnotMode mode, XReal left_tail,
                                    XReal right_tail, bool monotone) {
  std::string line;
  std::vector<double> knots;
  std::vector<XReal> values;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("x,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("grid csv: missing comma");
    knots.push_back(parse_value(line.substr(0, comma)));
    values.push_back(XReal(parse_value(line.substr(comma + 1))));
  }
  return KnotFunction(std::move(knots), std::move(values), mode, left_tail, right_tail, monotone);
}

std::string KnotFunction::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode_ == KnotMode::StepRightContinuous ? "step" : "linear";
  j["left_tail"] = format_value(left_tail_);
  j["right_tail"] = format_value(right_tail_);
  j["monotone"] = monotone_;
  j["knots"] = knots_;
  std::vector<std::string> vals;
  vals.reserve(values_.size());
  for (XReal v : values_) vals.push_back(format_value(v));
  j["values"] = vals;
  return j.dump(2);
}

KnotFunction KnotFunction::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  KnotMode mode =
      j.at("mode").get<std::string>() == "step" ? KnotMode::StepRightContinuous : KnotMode::PiecewiseLinear;
  std::vector<double> knots = j.at("knots").get<std::vector<double>>();
  std::vector<XReal> values;
  for (const auto& v : j.at("values")) values.push_back(XReal(parse_value(v.get<std::string>())));
  XReal lt(parse_value(j.at("left_tail").get<std::string>()));
  XReal rt(parse_value(j.at("right_tail").get<std::string>()));
  bool mono = j.value("monotone", false);
  return KnotFunction(std::move(knots), std::move(values), mode, lt, rt, mono);
}

KnotFunction empirical_cdf(const SampleData& sample) {
  const auto& obs = sample.observations();
  const double n = static_cast<double>(sample.n());
  std::vector<double> knots;
  std::vector<XReal> values;
  std::size_t i = 0;
  while (i < obs.size()) {
    std::size_t j = i;
    while (j + 1 < obs.size() && obs[j + 1] == obs[i]) ++j;
    knots.push_back(obs[i]);
    values.push_back(XReal(static_cast<double>(j + 1) / n));
    i = j + 1;
  }
  return KnotFunction(std::move(knots), std::move(values), KnotMode::StepRightContinuous,
                      XReal(0.0), XReal(1.0), /*monotone=*/true);
}

}  // namespace bisstar
