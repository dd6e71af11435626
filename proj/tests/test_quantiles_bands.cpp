#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "bisstar/band.hpp"
#include "bisstar/distributions.hpp"
#include "bisstar/parallel.hpp"
#include "bisstar/rng.hpp"

using namespace bisstar;

TEST_CASE("massart bound values") {
  CHECK(massart_bound(0.05) == doctest::Approx(1.35810).epsilon(1e-4));
  CHECK(massart_bound(0.5) == doctest::Approx(std::sqrt(std::log(4.0) / 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(massart_bound(2.0), std::invalid_argument);
}

TEST_CASE("ks quantile respects the distribution-free bound and preconditions") {
  QuantileEstimate q = ks_quantile(100, 0.05, 5000, 42);
  CHECK(q.kappa > 0.5);
  CHECK(q.kappa <= massart_bound(0.05));
  CHECK_THROWS_AS(ks_quantile(1, 0.05, 5000, 42), std::invalid_argument);
  CHECK_THROWS_AS(ks_quantile(100, 0.05, 10, 42), std::invalid_argument);
}

TEST_CASE("ks quantile two-seed agreement within 0.01") {
  QuantileEstimate a = ks_quantile(100, 0.05, 50000, 1, 0);
  QuantileEstimate b = ks_quantile(100, 0.05, 50000, 777, 0);
  CHECK(std::abs(a.kappa - b.kappa) < 0.01);
}

TEST_CASE("ks quantile is bit-identical across worker counts") {
  QuantileEstimate a = ks_quantile(60, 0.1, 20000, 5, 1);
  QuantileEstimate b = ks_quantile(60, 0.1, 20000, 5, 8);
  CHECK(a.kappa == b.kappa);
}

TEST_CASE("wks quantile reductions and parameter validation") {
  QuantileEstimate q0 = wks_quantile(50, 0.05, 0.0, 5000, 9);
  CHECK(std::isfinite(q0.kappa));
  CHECK(q0.kappa > 0.0);
  CHECK_THROWS_AS(wks_quantile(50, 0.05, 0.6, 5000, 9), std::invalid_argument);
  CHECK_THROWS_AS(wks_quantile(50, 0.05, -0.1, 5000, 9), std::invalid_argument);
}

TEST_CASE("wks quantile two-seed agreement within 0.02 at gamma 0.4") {
  QuantileEstimate a = wks_quantile(100, 0.05, 0.4, 50000, 3);
  QuantileEstimate b = wks_quantile(100, 0.05, 0.4, 50000, 991);
  CHECK(std::abs(a.kappa - b.kappa) < 0.02);
  CHECK(a.kappa < 10.0);  // O(1) magnitude
}

TEST_CASE("distribution-freeness: model samples pushed through their own cdf") {
  // The statistic computed from F(X_(i)) with X = F^{-1}(U) equals the
  // uniform-sample statistic up to floating point roundoff in F(F^{-1}(u)).
  ModelPtr model = make_student_t(3.0);
  const int n = 50, reps = 2000;
  std::vector<double> stat_uniform(reps), stat_model(reps);
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::stream(4242, rep);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform01();
    std::sort(u.begin(), u.end());
    double worst_u = 0.0, worst_m = 0.0;
    for (int i = 1; i <= n; ++i) {
      double pu = u[i - 1];
      double pm = model->cdf(model->quantile(u[i - 1]));
      worst_u = std::max({worst_u, std::abs(pu - static_cast<double>(i) / n),
                          std::abs(pu - static_cast<double>(i - 1) / n)});
      worst_m = std::max({worst_m, std::abs(pm - static_cast<double>(i) / n),
                          std::abs(pm - static_cast<double>(i - 1) / n)});
    }
    stat_uniform[rep] = std::sqrt(1.0 * n) * worst_u;
    stat_model[rep] = std::sqrt(1.0 * n) * worst_m;
  }
  std::sort(stat_uniform.begin(), stat_uniform.end());
  std::sort(stat_model.begin(), stat_model.end());
  std::size_t k = static_cast<std::size_t>(std::ceil(0.95 * reps)) - 1;
  CHECK(stat_uniform[k] == doctest::Approx(stat_model[k]).epsilon(1e-9));
}

TEST_CASE("ks band arithmetic and tails") {
  SampleData s({1.0, 2.0, 3.0, 4.0});
  QuantileEstimate q;
  q.kappa = 0.0;
  q.n = 4;
  q.alpha = 0.05;
  q.kind = BandKind::KS;

  SUBCASE("zero kappa degenerates to the empirical cdf") {
    // kappa = 0 is forced, bypassing calibration.
    Band b = ks_band(s, 0.05, q);
    KnotFunction cdf = empirical_cdf(s);
    for (int i = 0; i < cdf.size(); ++i) {
      CHECK(b.lower.values()[i].raw() == cdf.values()[i].raw());
      CHECK(b.upper.values()[i].raw() == cdf.values()[i].raw());
    }
  }

  SUBCASE("half width and clipping at level 0.05, n = 100") {
    ModelPtr model = make_student_t(1.0);
    SampleData big = model->sample(100, 17);
    QuantileEstimate qm;
    qm.kappa = 1.3581;
    qm.n = 100;
    qm.alpha = 0.05;
    qm.kind = BandKind::KS;
    Band b = ks_band(big, 0.05, qm);
    double half = 1.3581 / 10.0;
    KnotFunction cdf = empirical_cdf(big);
    for (int i = 0; i < cdf.size(); ++i) {
      double fn = cdf.values()[i].raw();
      CHECK(b.lower.values()[i].raw() ==
            doctest::Approx(std::max(fn - half, 0.0)).epsilon(1e-12));
      CHECK(b.upper.values()[i].raw() ==
            doctest::Approx(std::min(fn + half, 1.0)).epsilon(1e-12));
    }
    // Left of all data: lower 0, upper kappa / sqrt(n).
    double far_left = big.observations().front() - 100.0;
    CHECK(b.lower.evaluate(far_left).raw() == 0.0);
    CHECK(b.upper.evaluate(far_left).raw() == doctest::Approx(half));
  }

  SUBCASE("mismatched n is a config error") {
    q.n = 7;
    CHECK_THROWS_AS(ks_band(s, 0.05, q), std::invalid_argument);
  }
}

TEST_CASE("wks band boundary conventions and zero-kappa identity") {
  SampleData s({1.0, 2.0, 3.0, 4.0, 5.0});
  QuantileEstimate q;
  q.kappa = 0.0;
  q.n = 5;
  q.alpha = 0.05;
  q.gamma_w = 0.25;
  q.kind = BandKind::WKS;
  Band b = wks_band(s, 0.05, 0.25, q);
  const int n = 5;
  for (int i = 0; i < 5; ++i) {
    double ti = static_cast<double>(i + 1) / (n + 1);
    double ti1 = static_cast<double>(i + 2) / (n + 1);
    CHECK(b.lower.values()[i].raw() == doctest::Approx(ti));
    if (i < 4) CHECK(b.upper.values()[i].raw() == doctest::Approx(ti1));
  }
  CHECK(b.lower.left_tail().raw() == 0.0);      // i = 0 keeps only the defined term
  CHECK(b.upper.values()[4].raw() == 1.0);      // i = n likewise
  CHECK(b.upper.right_tail().raw() == 1.0);
}

TEST_CASE("wks band is narrower than ks near the tails for matched alpha") {
  ModelPtr model = make_student_t(1.0);
  SampleData s = model->sample(100, 0);
  QuantileEstimate qk = ks_quantile(100, 0.05, 20000, 11);
  QuantileEstimate qw = wks_quantile(100, 0.05, 0.4, 20000, 11);
  Band ks = ks_band(s, 0.05, qk);
  Band wks = wks_band(s, 0.05, 0.4, qw);
  // Compare widths at the extreme data knots.
  auto width = [](const Band& b, double x) {
    return b.upper.evaluate(x).raw() - b.lower.evaluate(x).raw();
  };
  double lo_x = s.observations().front();
  double hi_x = s.observations().back();
  CHECK(width(wks, lo_x) < width(ks, lo_x));
  CHECK(width(wks, hi_x - 1e-9) < width(ks, hi_x - 1e-9));
}

TEST_CASE("bands contain the empirical cdf and stay within [0, 1]") {
  ModelPtr model = make_pareto(2.0, 1.0);
  SampleData s = model->sample(80, 5);
  QuantileEstimate qk = ks_quantile(80, 0.1, 5000, 2);
  QuantileEstimate qw = wks_quantile(80, 0.1, 0.3, 5000, 2);
  KnotFunction cdf = empirical_cdf(s);
  for (const Band& b : {ks_band(s, 0.1, qk), wks_band(s, 0.1, 0.3, qw)}) {
    validate_band(b);
    for (int i = 0; i < cdf.size(); ++i) {
      double fn = cdf.values()[i].raw();
      double x = cdf.knots()[i];
      CHECK(b.lower.evaluate(x).raw() <= fn + 1e-12);
      CHECK(b.upper.evaluate(x).raw() >= fn - 1e-12);
    }
  }
}

TEST_CASE("exact coverage calibration of the ks band") {
  // Validate the quantile on fresh replications: empirical coverage within
  // 1 - alpha +/- 3 sqrt(alpha (1 - alpha) / M).
  const int n = 40;
  const double alpha = 0.1;
  QuantileEstimate q = ks_quantile(n, alpha, 50000, 303);
  const int m_reps = 20000;
  std::vector<int> covered(m_reps);
  parallel_for(m_reps, 0, [&](std::size_t rep) {
    Rng rng = Rng::stream(909090, rep);
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform01();
    std::sort(u.begin(), u.end());
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
      worst = std::max({worst, std::abs(u[i - 1] - static_cast<double>(i) / n),
                        std::abs(u[i - 1] - static_cast<double>(i - 1) / n)});
    }
    covered[rep] = std::sqrt(1.0 * n) * worst <= q.kappa;
  });
  double cov = 0.0;
  for (int c : covered) cov += c;
  cov /= m_reps;
  double band = 3.0 * std::sqrt(alpha * (1 - alpha) / m_reps);
  CHECK(cov >= 1 - alpha - band);
  CHECK(cov <= 1 - alpha + band + 0.01);  // conservative rounding biases coverage up
}

TEST_CASE("quantile cache round trip") {
  std::string path = "quantile_cache_test.json";
  std::remove(path.c_str());
  {
    QuantileCache cache(path);
    CHECK_FALSE(cache.lookup(BandKind::KS, 10, 0.05, 0.0, 2000, 1).has_value());
    QuantileEstimate q = ks_quantile(10, 0.05, 2000, 1);
    cache.store(q);
  }
  {
    QuantileCache cache(path);
    auto hit = cache.lookup(BandKind::KS, 10, 0.05, 0.0, 2000, 1);
    REQUIRE(hit.has_value());
    CHECK(hit->kappa == ks_quantile(10, 0.05, 2000, 1).kappa);
  }
  std::remove(path.c_str());
}

TEST_CASE("sentinel band shape") {
  Band s = make_infeasible_sentinel({0.0, 1.0}, 0.05, BandKind::Refined, 0.0, -1.0);
  validate_band(s);
  CHECK_FALSE(s.feasible());
  CHECK(s.lower.evaluate(0.5).raw() == 1.0);
  CHECK(s.upper.evaluate(0.5).raw() == 0.0);
}
