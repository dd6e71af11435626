#include "doctest.h"

#include <cmath>
#include <sstream>

#include "bisstar/knot_function.hpp"
#include "bisstar/rng.hpp"
#include "bisstar/xreal.hpp"

using namespace bisstar;

TEST_CASE("extended reals order and detect indeterminate forms") {
  XReal inf = XReal::inf();
  XReal ninf = XReal::neg_inf();
  CHECK(ninf < XReal(0.0));
  CHECK(XReal(0.0) < inf);
  CHECK(ninf < inf);
  CHECK((XReal(2.0) + inf).is_inf());
  CHECK((XReal(2.0) * ninf).is_neg_inf());
  CHECK_THROWS_AS(inf + ninf, std::domain_error);
  CHECK_THROWS_AS(XReal(0.0) * inf, std::domain_error);
  CHECK_THROWS_AS(inf / inf, std::domain_error);
  CHECK_THROWS_AS(XReal(std::nan("")), std::domain_error);
}

TEST_CASE("empirical cdf degenerate two-point sample steps 0 to 1") {
  SampleData s({0.0, 0.0});
  KnotFunction cdf = empirical_cdf(s);
  CHECK(cdf.size() == 1);
  CHECK(cdf.evaluate(-0.1).raw() == 0.0);
  CHECK(cdf.evaluate(0.0).raw() == 1.0);
  CHECK(cdf.evaluate(0.5).raw() == 1.0);
}

TEST_CASE("empirical cdf midpoint of four points") {
  SampleData s({1.0, 2.0, 3.0, 4.0});
  KnotFunction cdf = empirical_cdf(s);
  CHECK(cdf.evaluate(2.5).raw() == doctest::Approx(0.5));
}

TEST_CASE("empirical cdf hits i/n at order statistics") {
  Rng rng(7);
  std::vector<double> xs(5);
  for (double& x : xs) x = rng.uniform01();
  SampleData s(xs);
  KnotFunction cdf = empirical_cdf(s);
  CHECK(cdf.evaluate(s.observations()[2]).raw() == doctest::Approx(0.6));
}

TEST_CASE("empirical cdf has n jumps of size 1/n for distinct data") {
  Rng rng(12);
  std::vector<double> xs(40);
  for (double& x : xs) x = rng.uniform01();
  SampleData s(xs);
  KnotFunction cdf = empirical_cdf(s);
  REQUIRE(cdf.size() == 40);
  double prev = 0.0;
  for (int i = 0; i < cdf.size(); ++i) {
    double v = cdf.values()[i].raw();
    CHECK(v - prev == doctest::Approx(1.0 / 40).epsilon(1e-12));
    prev = v;
  }
}

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(SampleData({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SampleData({1.0, std::nan("")}), std::invalid_argument);
  SampleData tied({3.0, 1.0, 3.0, 2.0});
  CHECK(tied.tie_count() == 1);
  CHECK(tied.unique_values() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("step evaluation is right-continuous") {
  KnotFunction f({0.0, 1.0}, {XReal(0.0), XReal(1.0)}, KnotMode::StepRightContinuous, XReal(0.0),
                 XReal(1.0), true);
  CHECK(f.evaluate(0.5).raw() == 0.0);
  CHECK(f.evaluate(1.0).raw() == 1.0);
  CHECK(f.left_limit(1.0).raw() == 0.0);
  CHECK(f.left_limit(0.0).raw() == 0.0);
}

TEST_CASE("linear evaluation interpolates and rejects infinite endpoints") {
  KnotFunction f({0.0, 1.0}, {XReal(0.0), XReal(1.0)}, KnotMode::PiecewiseLinear, XReal(0.0),
                 XReal(1.0));
  CHECK(f.evaluate(0.5).raw() == doctest::Approx(0.5));
  KnotFunction g({0.0, 1.0}, {XReal::neg_inf(), XReal(-1.0)}, KnotMode::PiecewiseLinear,
                 XReal::neg_inf(), XReal(-1.0));
  CHECK_THROWS_AS(g.evaluate(0.5), std::domain_error);
  CHECK(g.evaluate(0.0).is_neg_inf());
}

TEST_CASE("monotone flag is honored by evaluation on random queries") {
  Rng rng(99);
  std::vector<double> knots;
  std::vector<XReal> vals;
  double x = 0.0, v = 0.0;
  for (int i = 0; i < 30; ++i) {
    x += 0.1 + rng.uniform01();
    v += rng.uniform01();
    knots.push_back(x);
    vals.emplace_back(v);
  }
  KnotFunction f(knots, vals, KnotMode::PiecewiseLinear, XReal(vals.front()),
                 XReal(vals.back()), true);
  double prev = -1e300;
  for (int q = 0; q < 500; ++q) {
    double xq = knots.front() - 1.0 + (knots.back() - knots.front() + 2.0) * q / 499.0;
    double fv = f.evaluate(xq).raw();
    CHECK(fv >= prev - 1e-12);
    prev = fv;
  }
}

TEST_CASE("csv round trip reproduces knot values exactly") {
  KnotFunction f({-1.5, 0.25, 3.0}, {XReal::neg_inf(), XReal(0.12345678901234567), XReal(1.0)},
                 KnotMode::StepRightContinuous, XReal::neg_inf(), XReal(1.0));
  std::string csv = f.to_csv();
  std::istringstream in(csv);
  KnotFunction back =
      KnotFunction::from_csv(in, KnotMode::StepRightContinuous, XReal::neg_inf(), XReal(1.0));
  REQUIRE(back.size() == f.size());
  for (int i = 0; i < f.size(); ++i) {
    CHECK(back.knots()[i] == f.knots()[i]);
    CHECK(back.values()[i] == f.values()[i]);
  }
}

TEST_CASE("json round trip reproduces knot values exactly") {
  KnotFunction f({0.0, 2.0}, {XReal(0.5), XReal(0.75)}, KnotMode::PiecewiseLinear, XReal(0.0),
                 XReal(1.0), true);
  KnotFunction back = KnotFunction::from_json(f.to_json());
  CHECK(back.mode() == f.mode());
  CHECK(back.knots() == f.knots());
  CHECK(back.values()[0] == f.values()[0]);
  CHECK(back.values()[1] == f.values()[1]);
  CHECK(back.monotone());
}

TEST_CASE("knot validation rejects bad grids") {
  CHECK_THROWS_AS(KnotFunction({1.0, 1.0}, {XReal(0.0), XReal(1.0)},
                               KnotMode::StepRightContinuous, XReal(0.0), XReal(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(KnotFunction({2.0, 1.0}, {XReal(0.0), XReal(1.0)},
                               KnotMode::StepRightContinuous, XReal(0.0), XReal(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(KnotFunction({0.0, 1.0}, {XReal(1.0), XReal(0.0)},
                               KnotMode::StepRightContinuous, XReal(0.0), XReal(1.0), true),
                  std::invalid_argument);
}
