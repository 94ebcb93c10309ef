#include <doctest.h>

#include <cmath>
#include <random>

#include "varsob/error.hpp"
#include "varsob/generators.hpp"
#include "varsob/regularity.hpp"

using namespace varsob;

TEST_CASE("single point: every ball is the whole space") {
  const auto sp = MetricMeasureSpace::from_coords({{0.0}}, {1.0});
  for (double q : {0.5, 1.0, 3.0}) {
    const auto prof = best_lower_constant(sp, ExponentField::constant("Q", 1, q), 0.01, 1.0);
    CHECK(prof.b_lower == doctest::Approx(1.0));
  }
}

TEST_CASE("ten-point line with Q = 1 on [1, 5] matches brute force") {
  std::vector<std::vector<double>> c(10);
  for (std::size_t i = 0; i < 10; ++i) c[i] = {static_cast<double>(i)};
  const auto sp = MetricMeasureSpace::from_coords(c, std::vector<double>(10, 1.0));
  const auto prof = best_lower_constant(sp, ExponentField::constant("Q", 10, 1.0), 1.0, 5.0);
  // Open balls make the counts left-continuous in r, so #B/r is smallest at the distances themselves; the
  // integer radii are all on the scan grid.
  double brute = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < 10; ++x)
    for (int k = 0; k <= 4000; ++k) {
      const double r = 1.0 + k * 1e-3;
      brute = std::min(brute, ball_measure(sp, x, r) / r);
    }
  CHECK(prof.b_lower == doctest::Approx(brute).epsilon(1e-12));
  CHECK(prof.b_lower == doctest::Approx(1.0));
  // The end points attain it at every integer radius, interior points only at r = 1.
  bool end_point_seen = false;
  for (const auto& w : prof.witnesses) end_point_seen = end_point_seen || w.center == 0 || w.center == 9;
  CHECK(end_point_seen);
}

TEST_CASE("raising Q can only raise the constant for radii up to 1") {
  std::mt19937_64 rng(51);
  const auto sp = grid2d(5, 5, 0.2);
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<double> q(sp.size()), q2(sp.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = std::uniform_real_distribution<>(0.5, 3)(rng);
      q2[i] = q[i] + std::uniform_real_distribution<>(0, 1)(rng);
    }
    CHECK(best_lower_constant(sp, q2, 0.0, 1.0).b_lower >= best_lower_constant(sp, q, 0.0, 1.0).b_lower * (1 - 1e-12));
  }
}

TEST_CASE("the atom grid is lower regular with the two-zone dimension") {
  for (int n_dim : {1, 2}) {
    const auto g = ball_grid_with_atom(n_dim, 0.125);
    std::vector<double> q(g.space.size(), static_cast<double>(n_dim));
    q[g.origin] = 0.5;
    CHECK(best_lower_constant(g.space, q, 0.0, 1.0).b_lower > 0.0);
  }
}

TEST_CASE("dimension estimates") {
  const auto plane = grid2d(16, 16, 1.0);
  const auto est = estimate_dimension(plane, 1.5, 6.0);
  CHECK(est.slope[8 * 16 + 8] == doctest::Approx(2.0).epsilon(0.15));
  const auto line = grid1d(64, 1.0);
  const auto est1 = estimate_dimension(line, 1.5, 20.0);
  CHECK(est1.slope[32] == doctest::Approx(1.0).epsilon(0.2));
  CHECK_THROWS_AS(estimate_dimension(MetricMeasureSpace::from_coords({{0.0}}, {1.0}), 0.1, 1.0), Error);
}

TEST_CASE("threshold rescaling") {
  const auto q2 = ExponentField::constant("Q", 3, 2.0);
  CHECK(rescale_threshold(0.7, 1.0, 1.0, q2) == 0.7);
  CHECK(rescale_threshold(1.0, 1.0, 2.0, q2) == doctest::Approx(0.25));
  double prev = 1.0;
  for (double d = 1.0; d <= 8.0; d += 0.5) {
    const double b = rescale_threshold(1.0, 1.0, d, q2);
    CHECK(b <= prev);
    prev = b;
  }
  const double two_steps = rescale_threshold(rescale_threshold(0.9, 0.5, 1.3, q2), 1.3, 4.0, q2);
  CHECK(two_steps == doctest::Approx(rescale_threshold(0.9, 0.5, 4.0, q2)).epsilon(1e-12));
}
