#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "varsob/generators.hpp"
#include "varsob/varnorms.hpp"

using namespace varsob;

namespace {

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = std::uniform_real_distribution<>(lo, hi)(rng);
  return v;
}

MetricMeasureSpace random_line(std::mt19937_64& rng, std::size_t n, double w_lo = 0.05, double w_hi = 1.0) {
  std::vector<std::vector<double>> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = {static_cast<double>(i)};
  return MetricMeasureSpace::from_coords(c, draw(rng, n, w_lo, w_hi));
}

const MetricMeasureSpace& half_pair() {
  static const auto sp = MetricMeasureSpace::from_coords({{0.0}, {1.0}}, {0.5, 0.5});
  return sp;
}

}  // namespace

TEST_CASE("modular and norm on the analytic pair") {
  const ExponentField p("p", {1, 2});
  CHECK(modular(half_pair(), {2, 2}, p) == doctest::Approx(3.0));
  CHECK(luxemburg(half_pair(), {2, 2}, p).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(modular(half_pair(), {0, 0}, p) == 0.0);
  CHECK(luxemburg(half_pair(), {0, 0}, p).value == 0.0);
}

TEST_CASE("constants on a unit-mass space") {
  const auto sp = grid1d(4, 0.25);
  for (double c : {-3.0, 0.5, 2.0})
    for (double pv : {0.5, 1.0, 3.0}) {
      const auto p = ExponentField::constant("p", 4, pv);
      const FunctionSample u(4, c);
      CHECK(modular(sp, u, p) == doctest::Approx(std::pow(std::fabs(c), pv)));
      CHECK(luxemburg(sp, u, p).value == doctest::Approx(std::fabs(c)).epsilon(1e-9));
    }
}

TEST_CASE("norm tolerance is honoured") {
  const auto v = luxemburg(half_pair(), {2, 2}, ExponentField("p", {1, 2}), 1e-6);
  CHECK(v.tolerance <= 1e-6 * v.value);
  CHECK(v.value >= 2.0);
}

TEST_CASE("homogeneity") {
  std::mt19937_64 rng(31);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + inst % 8;
    const auto sp = random_line(rng, n);
    const ExponentField p("p", draw(rng, n, 0.4, 5));
    const auto u = draw(rng, n, -2, 2);
    const double c = std::uniform_real_distribution<>(-5, 5)(rng);
    FunctionSample cu(n);
    for (std::size_t i = 0; i < n; ++i) cu[i] = c * u[i];
    CHECK(luxemburg(sp, cu, p).value == doctest::Approx(std::fabs(c) * luxemburg(sp, u, p).value).epsilon(1e-8));
  }
}

TEST_CASE("unit-ball equivalence") {
  std::mt19937_64 rng(32);
  const double tol = 1e-10;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + inst % 8;
    const auto sp = random_line(rng, n);
    const ExponentField p("p", draw(rng, n, 0.4, 5));
    const auto u = draw(rng, n, -2, 2);
    const double norm = luxemburg(sp, u, p, tol).value;
    REQUIRE(norm > 0.0);
    FunctionSample a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u[i] / norm;
      b[i] = u[i] / (norm * (1 - 10 * tol));
    }
    CHECK(modular(sp, a, p) <= 1.0);
    CHECK(modular(sp, b, p) > 1.0);
  }
}

TEST_CASE("quasi-triangle inequality with 2^{1/p^-}") {
  std::mt19937_64 rng(33);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + inst % 8;
    const auto sp = random_line(rng, n);
    const ExponentField p("p", draw(rng, n, 0.3, 4));
    const auto u = draw(rng, n, -2, 2), v = draw(rng, n, -2, 2);
    FunctionSample w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = u[i] + v[i];
    const double kappa = std::pow(2.0, 1.0 / p.inf());
    CHECK(luxemburg(sp, w, p).value <= kappa * (luxemburg(sp, u, p).value + luxemburg(sp, v, p).value) * (1 + 1e-9));
  }
}

TEST_CASE("modular sandwich") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    std::mt19937_64 rng(seed);
    const auto sp = random_line(rng, 6);
    CHECK(rel_sandwich_check(sp, draw(rng, 6, -1, 1), ExponentField("p", draw(rng, 6, 0.5, 4))).pass());
  }
  const auto sp = grid1d(3, 1.0);
  const auto p = ExponentField::constant("p", 3, 2.5);
  const FunctionSample u{1, -2, 0.5};
  const auto rep = rel_sandwich_check(sp, u, p);
  CHECK(rep.pass());
  CHECK(luxemburg(sp, u, p).value == doctest::Approx(std::pow(modular(sp, u, p), 1 / 2.5)).epsilon(1e-9));
  const auto zero = rel_sandwich_check(sp, {0, 0, 0}, p);
  CHECK(zero.pass());
  CHECK(zero.lhs == 0.0);
}

TEST_CASE("Hoelder inequality") {
  const auto sp = grid1d(2, 0.5);
  const auto p = ExponentField::constant("p", 2, 2.0);
  const auto one = holder_inequality_check(sp, {1, 1}, {1, 1}, p);
  CHECK(one.pass());
  CHECK(one.lhs == doctest::Approx(1.0));
  CHECK(holder_inequality_check(sp, {0, 0}, {1, 1}, p).lhs == 0.0);
  std::mt19937_64 rng(3);
  const auto sp6 = random_line(rng, 6);
  CHECK(holder_inequality_check(sp6, draw(rng, 6, -1, 1), draw(rng, 6, -1, 1), ExponentField("p", draw(rng, 6, 1.1, 4)))
            .pass());
}

TEST_CASE("Lebesgue embedding constant") {
  const auto sp = grid1d(4, 0.25);
  const auto p = ExponentField::constant("p", 4, 1.0), q = ExponentField::constant("q", 4, 2.0);
  const double c = lebesgue_embedding_constant(p, q, sp);
  CHECK(c == doctest::Approx(2.0));
  std::mt19937_64 rng(34);
  for (int inst = 0; inst < 20; ++inst) {
    auto u = draw(rng, 4, -1, 1);
    const double nq = luxemburg(sp, u, q).value;
    for (double& x : u) x /= nq;
    CHECK(luxemburg(sp, u, p).value <= c * (1 + 1e-9));
  }
}

TEST_CASE("l^q(L^p) with q = infinity on a single level") {
  const auto sp = grid1d(2, 0.5);
  const auto p = ExponentField::constant("p", 2, 2.0);
  const auto q = ExponentField::constant("q", 2, kInfinity, true);
  SequenceSample small{0, {{0.5, 0.5}}}, big{0, {{3.0, 1.0}}};
  CHECK(mixed_modular_lq_lp(sp, small, p, q) == 0.0);
  CHECK(std::isinf(mixed_modular_lq_lp(sp, big, p, q)));
  CHECK(mixed_norm_lq_lp(sp, big, p, q).value == doctest::Approx(luxemburg(sp, {3.0, 1.0}, p).value).epsilon(1e-8));
  CHECK(mixed_norm_lq_lp(sp, SequenceSample{0, {{0, 0}}}, p, q).value == 0.0);
}

TEST_CASE("constant q: product formula and definition agree") {
  std::mt19937_64 rng(35);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 2 + inst % 6;
    const auto sp = random_line(rng, n);
    const ExponentField p("p", draw(rng, n, 0.5, 4));
    SequenceSample g{-1, {draw(rng, n, 0, 2), draw(rng, n, 0, 2), draw(rng, n, 0, 2)}};
    const double qc = std::uniform_real_distribution<>(0.5, 4)(rng);
    CHECK(mixed_norm_lq_lp(sp, g, p, ExponentField::constant("q", n, qc)).value ==
          doctest::Approx(mixed_norm_lq_lp_constant_q(sp, g, p, qc).value).epsilon(1e-8));
  }
}

TEST_CASE("closed-form modular agrees with the definition within 10 tol") {
  std::mt19937_64 rng(36);
  const double tol = 1e-10;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + inst % 10;
    const auto sp = random_line(rng, n);
    const ExponentField p("p", draw(rng, n, 0.5, 4)), q("q", draw(rng, n, 0.5, 4));
    SequenceSample g{0, {draw(rng, n, 0, 1.5), draw(rng, n, 0, 1.5), draw(rng, n, 0, 1.5), draw(rng, n, 0, 1.5)}};
    const double a = mixed_modular_lq_lp(sp, g, p, q), b = mixed_modular_lq_lp_closed(sp, g, p, q);
    CHECK(std::fabs(a - b) <= 10 * tol * std::max(1.0, a));
    std::vector<std::vector<double>> levels(g.levels.begin(), g.levels.end());
    CHECK(a == doctest::Approx(oracle::besov_modular(sp.weights(), levels, p.values(), q.values())).epsilon(1e-8));
  }
}

TEST_CASE("L^p(l^q)") {
  const auto sp = grid1d(3, 1.0 / 3);
  const auto p = ExponentField("p", {1, 2, 3});
  const FunctionSample g0{0.2, 1.0, 0.7};
  CHECK(mixed_norm_lp_lq(sp, SequenceSample{2, {g0}}, p, ExponentField::constant("q", 3, 1.5)).value ==
        doctest::Approx(luxemburg(sp, g0, p).value).epsilon(1e-9));
  const FunctionSample doubled{0.4, 2.0, 1.4};
  CHECK(mixed_norm_lp_lq(sp, SequenceSample{0, {g0, g0}}, p, ExponentField::constant("q", 3, 1.0)).value ==
        doctest::Approx(luxemburg(sp, doubled, p).value).epsilon(1e-9));
  CHECK(mixed_norm_lp_lq(sp, SequenceSample{0, {{0, 0, 0}}}, p, ExponentField::constant("q", 3, 1.0)).value == 0.0);
}

TEST_CASE("equal exponents make both mixed modulars coincide") {
  std::mt19937_64 rng(37);
  for (int inst = 0; inst < 30; ++inst) {
    const std::size_t n = 1 + inst % 7;
    const auto sp = random_line(rng, n);
    const auto pv = draw(rng, n, 0.5, 4);
    const ExponentField p("p", pv), q("q", pv);
    SequenceSample g{0, {draw(rng, n, 0, 2), draw(rng, n, 0, 2), draw(rng, n, 0, 2)}};
    CHECK(mixed_modular_lq_lp(sp, g, p, q) == doctest::Approx(mixed_modular_lp_lq(sp, g, p, q)).epsilon(1e-9));
  }
}

TEST_CASE("monotonicity in q") {
  std::mt19937_64 rng(4);
  const std::size_t n = 5;
  const auto sp = random_line(rng, n);
  const ExponentField p("p", draw(rng, n, 1, 3));
  SequenceSample g{0, {draw(rng, n, 0, 1), draw(rng, n, 0, 1), draw(rng, n, 0, 1)}};
  const auto q1 = ExponentField::constant("q", n, 1.0), q2 = ExponentField::constant("q", n, 2.0);
  CHECK(monotonicity_check(sp, g, p, q1, q2).pass());
  const auto same = monotonicity_check(sp, g, p, q1, q1);
  CHECK(same.pass());
  SequenceSample zero{0, {FunctionSample(n, 0.0)}};
  CHECK(monotonicity_check(sp, zero, p, q1, q2).pass());
}

TEST_CASE("Hoelder seminorm") {
  const auto sp = grid1d(6, 1.0);
  const auto alpha = ExponentField::constant("alpha", 6, 1.0);
  CHECK(holder_seminorm(FunctionSample(6, 4.0), alpha, sp) == 0.0);
  FunctionSample dist(6);
  for (std::size_t i = 0; i < 6; ++i) dist[i] = sp.distance(i, 2);
  CHECK(holder_seminorm(dist, alpha, sp) == doctest::Approx(1.0));
  FunctionSample scaled(6);
  for (std::size_t i = 0; i < 6; ++i) scaled[i] = -3.0 * dist[i];
  CHECK(holder_seminorm(scaled, alpha, sp) == doctest::Approx(3.0));
}

TEST_CASE("median") {
  const auto sp = grid1d(4, 1.0);
  CHECK(median(sp, FunctionSample(4, 2.5), all_points(sp)) == 2.5);
  CHECK(median(half_pair(), {0, 1}, {0, 1}) == 1.0);
  std::mt19937_64 rng(38);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + inst % 9;
    const auto s = random_line(rng, n);
    const auto u = draw(rng, n, -1, 1);
    const double c = std::uniform_real_distribution<>(0.1, 4)(rng);
    FunctionSample cu(n), au(n);
    for (std::size_t i = 0; i < n; ++i) {
      cu[i] = c * u[i];
      au[i] = std::fabs(u[i]);
    }
    const double m = median(s, u, all_points(s));
    CHECK(m == oracle::median(s.weights(), u));
    CHECK(median(s, cu, all_points(s)) == doctest::Approx(c * m).epsilon(1e-12));
    CHECK(std::fabs(m) <= median(s, au, all_points(s)));
  }
}

TEST_CASE("median bound") {
  const auto eq = median_bound_check(half_pair(), {0, 1}, {0, 1}, ExponentField::constant("p", 2, 1.0), 0.0);
  CHECK(eq.lhs == 1.0);
  CHECK(eq.rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eq.pass());
  const auto flat = median_bound_check(half_pair(), {3, 3}, {0, 1}, ExponentField::constant("p", 2, 2.0), 3.0);
  CHECK(flat.lhs == 0.0);
  CHECK(flat.pass());
  std::mt19937_64 rng(5);
  const auto sp = random_line(rng, 7);
  CHECK(median_bound_check(sp, draw(rng, 7, -1, 1), {0, 2, 3, 5}, ExponentField("p", draw(rng, 7, 0.5, 3)), 0.1)
            .pass());
  CHECK(median_factor(0.5, 1.0) == doctest::Approx(4.0));
  CHECK(median_factor(3.0, 1.0) == 2.0);
}
