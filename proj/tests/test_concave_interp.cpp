#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bisstar/concave_interp.hpp"
#include "bisstar/rng.hpp"

using namespace bisstar;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All-chords oracle: the least concave majorant at a knot equals the highest
// chord between finite points spanning it (a single point counts as its own
// chord).  O(m^3) overall, used only on small grids.
std::vector<double> lcm_brute_force(const std::vector<double>& grid,
                                    const std::vector<double>& lower) {
  const int m = static_cast<int>(grid.size());
  std::vector<double> out(m, -kInf);
  for (int k = 0; k < m; ++k) {
    double best = -kInf;
    for (int i = 0; i <= k; ++i) {
      if (lower[i] == -kInf) continue;
      for (int j = k; j < m; ++j) {
        if (lower[j] == -kInf) continue;
        double v = i == j ? lower[i]
                          : lower[i] + (lower[j] - lower[i]) * (grid[k] - grid[i]) /
                                           (grid[j] - grid[i]);
        best = std::max(best, v);
      }
    }
    out[k] = best;
  }
  return out;
}

// Random concave sequence on the grid: decreasing slopes, integrated.
std::vector<double> random_concave(Rng& rng, const std::vector<double>& grid) {
  std::vector<double> slopes(grid.size() - 1);
  for (double& s : slopes) s = 4.0 * rng.uniform01() - 2.0;
  std::sort(slopes.begin(), slopes.end(), std::greater<>());
  std::vector<double> g(grid.size());
  g[0] = 2.0 * rng.uniform01() - 1.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    g[i] = g[i - 1] + slopes[i - 1] * (grid[i] - grid[i - 1]);
  }
  return g;
}

std::vector<double> random_grid(Rng& rng, int m) {
  std::vector<double> grid(m);
  double x = 0.0;
  for (int i = 0; i < m; ++i) {
    x += 0.2 + rng.uniform01();
    grid[i] = x;
  }
  return grid;
}

}  // namespace

TEST_CASE("lcm of an already concave sequence is the identity") {
  std::vector<double> grid{0.0, 1.0, 2.0};
  std::vector<double> l{0.0, 1.0, 1.5};
  LcmResult r = least_concave_majorant(grid, l);
  CHECK(r.majorant == l);
  CHECK(r.active == std::vector<int>{0, 1, 2});
}

TEST_CASE("lcm bridges a convex dip with a chord") {
  LcmResult r = least_concave_majorant({0.0, 1.0, 2.0}, {0.0, -1.0, 0.0});
  CHECK(r.majorant[0] == 0.0);
  CHECK(r.majorant[1] == doctest::Approx(0.0));
  CHECK(r.majorant[2] == 0.0);
  CHECK(r.active == std::vector<int>{0, 2});
}

TEST_CASE("lcm requires two finite values") {
  CHECK_THROWS_AS(least_concave_majorant({0.0, 1.0, 2.0}, {-kInf, 1.0, -kInf}),
                  std::invalid_argument);
}

TEST_CASE("lcm equals the all-chords brute force on random grids") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    int m = 3 + static_cast<int>(rng.uniform01() * 4);
    std::vector<double> grid = random_grid(rng, m);
    std::vector<double> l(m);
    int finite = 0;
    for (double& v : l) {
      if (rng.uniform01() < 0.2) {
        v = -kInf;
      } else {
        v = 4.0 * rng.uniform01() - 2.0;
        ++finite;
      }
    }
    if (finite < 2) continue;
    LcmResult r = least_concave_majorant(grid, l);
    std::vector<double> bf = lcm_brute_force(grid, l);
    for (int k = 0; k < m; ++k) {
      if (bf[k] == -kInf) {
        CHECK(r.majorant[k] == -kInf);
      } else {
        CHECK(r.majorant[k] == doctest::Approx(bf[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conc_int hand example: dip below, envelope above") {
  // l = {0, 1, 0}, u = {0.5, 1.5, 0.5}: feasible, uo(1) = 1.5.
  ConcIntResult r = conc_int({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}, {0.5, 1.5, 0.5});
  REQUIRE(r.feasible);
  CHECK(r.uo_at_knots()[1] == doctest::Approx(1.5));
  CHECK(r.uo_at_knots()[0] == doctest::Approx(0.5));
  CHECK(r.uo_at_knots()[2] == doctest::Approx(0.5));
  CHECK(r.lo_at_knots() == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("conc_int pinched band keeps the envelope within epsilon") {
  std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
  std::vector<double> l{0.0, 0.9, 1.4, 1.6};  // concave
  std::vector<double> u(l);
  for (double& v : u) v += 1e-6;
  ConcIntResult r = conc_int(grid, l, u);
  REQUIRE(r.feasible);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(r.uo_at_knots()[k] >= l[k] - 1e-12);
    CHECK(r.uo_at_knots()[k] <= u[k] + 1e-12);
    CHECK(r.lo_at_knots()[k] == doctest::Approx(l[k]));
  }
}

TEST_CASE("conc_int with a huge upper bound extrapolates lines through the majorant") {
  std::vector<double> grid{0.0, 1.0, 2.0};
  std::vector<double> l{0.0, 1.0, 1.5};
  std::vector<double> u{1e6, 1e6, 1e6};
  ConcIntResult r = conc_int(grid, l, u);
  REQUIRE(r.feasible);
  // Between knots the envelope dips below the loose upper function: it is
  // pinned by lines through the majorant's active knots.
  CHECK(r.eval_uo(1.5) < 1e6);
  CHECK(r.eval_uo(1.5) >= r.eval_lo(1.5) - 1e-9);
  // Beyond the grid the envelope extrapolates the steepest admissible line.
  CHECK(r.eval_uo(10.0) >= r.eval_uo(2.0) - 1e-9);
}

TEST_CASE("infeasible when the majorant exceeds the upper function") {
  ConcIntResult r = conc_int({0.0, 1.0, 2.0}, {0.0, -1.0, 0.0}, {0.1, -0.5, 0.1});
  CHECK_FALSE(r.feasible);  // chord over the dip sits at 0 > -0.5
}

TEST_CASE("random instances: extremality, oracle equivalence, idempotence") {
  Rng rng(77);
  int feasible_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int m = 3 + static_cast<int>(rng.uniform01() * 6);
    std::vector<double> grid = random_grid(rng, m);
    std::vector<double> w = random_concave(rng, grid);
    std::vector<double> l(m), u(m);
    bool force_feasible = rng.uniform01() < 0.7;
    for (int i = 0; i < m; ++i) {
      if (force_feasible) {
        l[i] = w[i] - 0.05 - rng.uniform01();
        u[i] = w[i] + 0.05 + rng.uniform01();
      } else {
        l[i] = w[i] - 1.5 * rng.uniform01() + 0.4;
        u[i] = l[i] + 0.01 + 0.3 * rng.uniform01();
      }
      if (rng.uniform01() < 0.15) l[i] = -kInf;
    }
    int finite = 0;
    for (double v : l) finite += (v != -kInf);
    if (finite < 2) continue;

    // Oracle: infeasible iff the brute-force majorant exceeds u somewhere.
    std::vector<double> bf = lcm_brute_force(grid, l);
    bool oracle_feasible = true;
    for (int k = 0; k < m; ++k) {
      if (bf[k] > u[k] + kConcIntFeasibilityTol) oracle_feasible = false;
    }
    ConcIntResult r = conc_int(grid, l, u);
    REQUIRE(r.feasible == oracle_feasible);
    if (!r.feasible) continue;
    ++feasible_count;

    if (force_feasible) {
      // The generating concave witness lies between the envelopes.
      for (int k = 0; k < m; ++k) {
        CHECK(r.lo_at_knots()[k] <= w[k] + 1e-9);
        CHECK(r.uo_at_knots()[k] >= w[k] - 1e-9);
      }
      // So do convex combinations of the witness and the majorant.
      for (int k = 0; k < m; ++k) {
        double mix = 0.5 * w[k] + 0.5 * r.lo_at_knots()[k];
        CHECK(r.lo_at_knots()[k] <= mix + 1e-9);
        CHECK(r.uo_at_knots()[k] >= mix - 1e-9);
      }
    }
    for (int k = 0; k < m; ++k) {
      CHECK(r.lo_at_knots()[k] <= r.uo_at_knots()[k] + 1e-9);
      CHECK(r.lo_at_knots()[k] >= l[k] - 1e-12);
      CHECK(r.uo_at_knots()[k] <= u[k] + 1e-12);
    }

    // Idempotence: feeding the envelopes back reproduces them.
    ConcIntResult r2 = conc_int(grid, r.lo_at_knots(), r.uo_at_knots());
    REQUIRE(r2.feasible);
    for (int k = 0; k < m; ++k) {
      if (r.lo_at_knots()[k] == -kInf) {
        CHECK(r2.lo_at_knots()[k] == -kInf);
      } else {
        CHECK(r2.lo_at_knots()[k] == doctest::Approx(r.lo_at_knots()[k]).epsilon(1e-12));
      }
      CHECK(r2.uo_at_knots()[k] == doctest::Approx(r.uo_at_knots()[k]).epsilon(1e-12));
    }
  }
  CHECK(feasible_count > 100);
}

TEST_CASE("monotone in inputs: wider u never shrinks uo, higher l never lowers lo") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 4 + static_cast<int>(rng.uniform01() * 4);
    std::vector<double> grid = random_grid(rng, m);
    std::vector<double> w = random_concave(rng, grid);
    std::vector<double> l(m), u(m), u2(m), l2(m);
    for (int i = 0; i < m; ++i) {
      l[i] = w[i] - 0.1 - rng.uniform01();
      u[i] = w[i] + 0.1 + rng.uniform01();
      u2[i] = u[i] + rng.uniform01();
      l2[i] = l[i] + 0.5 * (w[i] - l[i]) * rng.uniform01();
    }
    ConcIntResult base = conc_int(grid, l, u);
    ConcIntResult wide = conc_int(grid, l, u2);
    ConcIntResult lifted = conc_int(grid, l2, u);
    REQUIRE(base.feasible);
    REQUIRE(wide.feasible);
    REQUIRE(lifted.feasible);
    for (int k = 0; k < m; ++k) {
      CHECK(wide.uo_at_knots()[k] >= base.uo_at_knots()[k] - 1e-9);
      CHECK(lifted.lo_at_knots()[k] >= base.lo_at_knots()[k] - 1e-9);
    }
  }
}

TEST_CASE("conc_int input validation") {
  CHECK_THROWS_AS(conc_int({0.0, 1.0}, {0.0, 0.0}, {1.0, -kInf}), std::invalid_argument);
  CHECK_THROWS_AS(conc_int({0.0}, {0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(conc_int({0.0, 1.0, 2.0}, {-kInf, 0.0, -kInf}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
}
