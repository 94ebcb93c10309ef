#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "varsob/constants.hpp"
#include "varsob/error.hpp"
#include "varsob/generators.hpp"
#include "varsob/verify.hpp"

using namespace varsob;

namespace {

ExponentField constant(const char* name, std::size_t n, double v, bool inf = false) {
  return ExponentField::constant(name, n, v, inf);
}

struct Plane {
  MetricMeasureSpace sp = grid2d(8, 8, 1.0 / 8);
  std::size_t x0 = nearest_point(sp, {0.5, 0.5});
  std::size_t n = sp.size();
};

const Plane& plane() {
  static const Plane p;
  return p;
}

const Hypothesis* find(const VerificationReport& rep, const std::string& name) {
  for (const auto& h : rep.hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

}  // namespace

TEST_CASE("Sobolev-Poincare local: constants and hypothesis failure") {
  const auto& pl = plane();
  const auto s = constant("s", pl.n, 1.0), p = constant("p", pl.n, 1.0), q = constant("Q", pl.n, 2.0);
  const auto flat = check_sobolev_local(pl.sp, pl.x0, 0.25, FunctionSample(pl.n, 3.0), s, p, q);
  CHECK(flat.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.pass());
  const auto lin = check_sobolev_local(pl.sp, pl.x0, 0.25, coordinate_function(pl.sp, 0), s, p, q);
  CHECK(lin.pass());
  CHECK(lin.constant_provenance == "empirical");
  CHECK(std::isfinite(lin.values.at("empirical_constant")));

  const auto line = grid1d(64, 1.0 / 64);
  const auto one = constant("s", 64, 1.0);
  const auto rep = check_sobolev_local(line, 32, 0.25, coordinate_function(line, 0), one, constant("p", 64, 1.0),
                                       constant("Q", 64, 1.0));
  CHECK(rep.verdict == Verdict::not_applicable);
  CHECK_FALSE(find(rep, "sp_below_Q")->holds);
}

TEST_CASE("Sobolev-Poincare local: a supplied constant is used as given") {
  const auto& pl = plane();
  HarnessOptions o;
  o.constant = 1e-6;
  const auto rep = check_sobolev_local(pl.sp, pl.x0, 0.25, coordinate_function(pl.sp, 0), constant("s", pl.n, 1.0),
                                       constant("p", pl.n, 1.0), constant("Q", pl.n, 2.0), o);
  CHECK(rep.constant_provenance == "supplied");
  CHECK(rep.constant_used == 1e-6);
  CHECK(rep.verdict == Verdict::fail);
}

TEST_CASE("Moser-Trudinger local") {
  const auto sp = grid2d(16, 16, 1.0 / 16);
  const std::size_t n = sp.size(), x0 = nearest_point(sp, {0.5, 0.5});
  const auto s = constant("s", n, 1.0), p = constant("p", n, 2.0), q = constant("Q", n, 2.0);
  const auto flat = check_moser_trudinger_local(sp, x0, 0.25, FunctionSample(n, 1.0), s, p, q);
  CHECK(flat.lhs == doctest::Approx(1.0));
  CHECK(flat.pass());
  const auto bump = log_bump(sp, x0, 0.25);
  const auto rep = check_moser_trudinger_local(sp, x0, 0.25, bump, s, p, q);
  CHECK(rep.pass());
  CHECK(std::isfinite(rep.lhs));
  // The default constant was calibrated on exactly this scenario.
  CHECK(rep.values.at("calibrated_c1") == doctest::Approx(2.5707413984346204).epsilon(1e-6));
  CHECK(kDefaultMtC1 <= rep.values.at("calibrated_c1"));

  // exp(c1 |u - u_B| / N) decreases to 1 as c1 decreases to 0.
  const Ball b = ball(sp, x0, 0.25);
  PointSet members = b.members;
  std::sort(members.begin(), members.end());
  const auto ball_space = sp.restrict_to(members);
  const auto ub = restrict_values(bump, members);
  double prev = kInfinity;
  for (double c1 : {4.0, 2.0, 1.0, 0.5, 0.1, 1e-3, 1e-6}) {
    const double avg = exponential_average(ball_space, ub, c1, 1.0);
    CHECK(avg <= prev);
    CHECK(avg >= 1.0);
    prev = avg;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Morrey local on the unit interval") {
  std::vector<double> consts;
  for (std::size_t m : {32, 64, 128}) {
    const auto sp = grid1d(m + 1, 1.0 / static_cast<double>(m));
    const std::size_t n = sp.size();
    FunctionSample u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::sqrt(sp.coords()[i][0]);
    const auto rep = check_morrey_local(sp, m / 2, 0.25, u, constant("s", n, 1.0), constant("p", n, 2.0),
                                        constant("Q", n, 1.0));
    CHECK(rep.pass());
    CHECK(rep.values.at("alpha_x0") == doctest::Approx(0.5));
    consts.push_back(rep.values.at("c_h"));
  }
  const auto [lo, hi] = std::minmax_element(consts.begin(), consts.end());
  CHECK(*hi / *lo < 1.5);
  const auto sp = grid1d(5, 1.0);
  const auto single = check_morrey_local(sp, 2, 0.5, {0, 1, 2, 3, 4}, constant("s", 5, 1.0), constant("p", 5, 2.0),
                                         constant("Q", 5, 1.0), HarnessOptions{.delta = 10.0});
  CHECK(single.lhs == 0.0);
}

TEST_CASE("local embedding with constant functions") {
  const auto& pl = plane();
  const auto s = constant("s", pl.n, 1.0), p = constant("p", pl.n, 1.0), q = constant("Q", pl.n, 2.0);
  for (double c : {0.0, 2.0, -1.5}) {
    const auto rep = localemb_check(pl.sp, pl.x0, 0.25, FunctionSample(pl.n, c), s, p, q);
    CHECK(rep.pass());
    CHECK(rep.lhs == doctest::Approx(std::fabs(c) * rep.values.at("unit_norm_gamma")).epsilon(1e-8));
  }
  const auto lin = localemb_check(pl.sp, pl.x0, 0.25, coordinate_function(pl.sp, 1), s, p, q);
  CHECK(lin.pass());
  CHECK(lin.values.at("printed_holds") == 1.0);
}

TEST_CASE("global harness") {
  const auto sp = grid2d(6, 6, 1.0 / 6);
  const std::size_t n = sp.size();
  const auto s = constant("s", n, 1.0), p = constant("p", n, 1.0), q = constant("Q", n, 2.0);
  for (auto th : {GlobalTheorem::bounded, GlobalTheorem::doubling_sob}) {
    const auto flat = check_global(sp, FunctionSample(n, 0.0), s, p, q, th);
    CHECK(flat.lhs == 0.0);
    CHECK(flat.pass());
    CHECK(check_global(sp, coordinate_function(sp, 0), s, p, q, th).pass());
  }
  const auto p2 = constant("p", n, 2.0);
  CHECK(check_global(sp, log_bump(sp, 14, 0.3), s, p2, q, GlobalTheorem::doubling_mt).pass());
  const auto p3 = constant("p", n, 3.0);
  CHECK(check_global(sp, coordinate_function(sp, 0), s, p3, q, GlobalTheorem::doubling_holder).pass());
}

TEST_CASE("counterexample") {
  const auto rep = counterexample_run({});
  CHECK(rep.pass());
  for (int k = 0; k < 3; ++k) {
    const double h = std::ldexp(1.0, -4 - k);
    CHECK(rep.values.at("quotient_" + std::to_string(k)) == doctest::Approx(std::pow(h, -0.15)).epsilon(1e-12));
    CHECK(rep.values.at("b_lower_" + std::to_string(k)) > 0.0);
  }
  // Exponent -0.15: a tenfold refinement multiplies the quotient by 10^{0.15} = 1.41.
  CHECK(std::pow(10.0, 0.15) == doctest::Approx(1.41).epsilon(1e-2));
  CounterexampleOptions bad;
  bad.theta = 0.75;
  CHECK_THROWS_AS(counterexample_run(bad), Error);
  bad.theta = 0.5;
  CHECK_THROWS_AS(counterexample_run(bad), Error);
  CHECK(counterexample_continuum_modular(1, 2.0, 0.6) == doctest::Approx(2.0 / (1.2 - 2.0 + 1.0)));
}

TEST_CASE("necessity") {
  const auto sp = grid2d(8, 8, 1.0 / 8);
  const std::size_t n = sp.size();
  const auto s = constant("s", n, 0.5), p = constant("p", n, 2.0), q = constant("q", n, 2.0, true);
  const auto q_dim = constant("Q", n, 2.0);
  const auto gamma = sobolev_conjugate(q_dim, s, p);
  const auto back = necessity_dimension(NecessityMode::sobolev_global, s, p, gamma);
  for (double v : back) CHECK(std::fabs(v - 2.0) <= 1e-12);
  const auto rep = necessity_run(sp, s, p, q, gamma);
  CHECK(rep.pass());
  CHECK(rep.values.at("b_lower") > 0.0);
  CHECK(rep.notes.count("chain"));

  const auto atom = MetricMeasureSpace::from_coords({{0.0}, {1.0}, {2.0}}, {5.0, 0.01, 0.01});
  NecessityOptions o;
  o.mode = NecessityMode::holder;
  o.epsilon = 3.0;
  const auto atom_rep = necessity_run(atom, constant("s", 3, 0.5), constant("p", 3, 4.0),
                                      constant("q", 3, kInfinity, true), ExponentField("alpha", {0.5, 0.25, 0.25}), o);
  CHECK(atom_rep.pass());
  CHECK(atom_rep.values.at("missing_atoms") == 0.0);
}

TEST_CASE("embedding suite on a fixed instance") {
  const auto sp = MetricMeasureSpace::from_coords({{0, 0}, {0.3, 0}, {0, 0.4}, {0.5, 0.5}}, {0.3, 0.2, 0.4, 0.1});
  EmbeddingInputs in{ExponentField("s", {0.5, 0.6, 0.4, 0.5}),     ExponentField("p", {1.5, 2, 1, 3}),
                     ExponentField("q", {1, 2, 1.5, 1}, true),     ExponentField("q", {2, 2, 3, 1}, true),
                     ExponentField("t", {0.4, 0.45, 0.3, 0.35}),   0,
                     0.6,                                          1.0};
  const auto reports = embeddings_suite(sp, {0.1, -0.4, 0.8, 0.3}, in);
  std::set<std::string> names;
  for (const auto& r : reports) {
    names.insert(r.theorem);
    CHECK_MESSAGE(r.pass(), r.theorem);
  }
  CHECK(names.size() == 9);
}

// Every hypothesis a harness checks must be able to fail on its own, turning a passing scenario into
// not_applicable. Hypotheses that finite data can never violate are listed separately and checked to hold.
TEST_CASE("each hypothesis is load-bearing") {
  const auto& pl = plane();
  const std::size_t n = pl.n;
  const auto s1 = constant("s", n, 1.0), p1 = constant("p", n, 1.0), p2 = constant("p", n, 2.0);
  const auto q2 = constant("Q", n, 2.0);
  const auto u = coordinate_function(pl.sp, 0);
  const auto bump = log_bump(pl.sp, pl.x0, 0.25);

  struct Case {
    std::string hypothesis;
    std::function<VerificationReport()> base, broken;
    bool alone = true;  // no other hypothesis fails in the broken scenario
  };
  auto sob = [&](double r0, HarnessOptions o, const ExponentField& p) {
    return [=, &pl] { return check_sobolev_local(pl.sp, pl.x0, r0, u, s1, p, q2, o); };
  };
  HarnessOptions sigma_one;
  sigma_one.sigma = 1.0;
  HarnessOptions big_b;
  big_b.b = 1e6;
  HarnessOptions tight_clog;
  tight_clog.clog_max = 0.1;
  const std::vector<double> wavy = [&] {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * (i % 2);
    return v;
  }();
  const auto line = grid1d(33, 1.0 / 32);
  FunctionSample root(33);
  for (std::size_t i = 0; i < 33; ++i) root[i] = std::sqrt(i / 32.0);
  const auto sl = constant("s", 33, 1.0), ql = constant("Q", 33, 1.0);
  const auto cut = annular_cutoff(pl.sp, pl.x0, 0.1, 0.3);
  PointSet bset = ball_members(pl.sp, pl.x0, 0.3);
  std::sort(bset.begin(), bset.end());
  const auto sh = constant("s", n, 0.5), qq = constant("q", n, 2.0, true);
  NecessityOptions moser;
  moser.mode = NecessityMode::moser;
  moser.epsilon = 0.2;
  NecessityOptions fine = moser;
  fine.epsilon = 0.05;
  const auto gamma = sobolev_conjugate(q2, sh, p2);

  const std::vector<Case> cases = {
      {"sigma_above_one", sob(0.25, {}, p1), sob(0.25, sigma_one, p1)},
      {"radius", sob(0.25, {}, p1), sob(0.6, {}, p1)},
      {"lower_regular", sob(0.25, {}, p1), sob(0.25, big_b, p1)},
      {"log_holder", sob(0.25, tight_clog, p1),
       [&] { return check_sobolev_local(pl.sp, pl.x0, 0.25, u, s1, ExponentField("p", wavy), q2, tight_clog); }},
      {"sp_below_Q", sob(0.25, {}, p1), sob(0.25, {}, p2)},
      {"sp_equals_Q", [&] { return check_moser_trudinger_local(pl.sp, pl.x0, 0.25, bump, s1, p2, q2); },
       [&] { return check_moser_trudinger_local(pl.sp, pl.x0, 0.25, bump, s1, constant("p", n, 1.5), q2); }},
      {"sp_above_Q",
       [&] { return check_morrey_local(line, 16, 0.25, root, sl, constant("p", 33, 2.0), ql); },
       [&] { return check_morrey_local(line, 16, 0.25, root, sl, constant("p", 33, 1.0), ql); }},
      {"s_plus_below_one", [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 5.0, sh, p2, qq); },
       [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 5.0, s1, p2, qq); }},
      {"lipschitz", [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 5.0, sh, p2, qq); },
       [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 1.0, sh, p2, qq); }},
      {"values_in_unit_interval", [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 5.0, sh, p2, qq); },
       [&] {
         auto v = cut;
         for (double& x : v) x *= 0.5;
         v[pl.x0] = 1.2;
         return lipschitz_cutoff_check(pl.sp, v, bset, 1e3, sh, p2, qq);
       }},
      {"supported_in_b", [&] { return lipschitz_cutoff_check(pl.sp, cut, bset, 5.0, sh, p2, qq); },
       [&] { return lipschitz_cutoff_check(pl.sp, cut, {pl.x0}, 5.0, sh, p2, qq); }},
      {"gamma_above_p", [&] { return necessity_run(pl.sp, sh, p2, qq, gamma); },
       [&] { return necessity_run(pl.sp, sh, p2, qq, p2); }},
      {"s_plus_bound", [&] { return necessity_run(pl.sp, sh, p2, qq, gamma); },
       [&] { return necessity_run(pl.sp, s1, p2, qq, gamma); }},
      {"uniformly_perfect", [&] { return necessity_run(pl.sp, sh, constant("p", n, 4.0), qq, std::nullopt, moser); },
       [&] { return necessity_run(pl.sp, sh, constant("p", n, 4.0), qq, std::nullopt, fine); }},
      {"s_at_least_alpha",
       [&] {
         NecessityOptions o = moser;
         o.mode = NecessityMode::holder;
         return necessity_run(pl.sp, sh, constant("p", n, 8.0), constant("q", n, kInfinity, true),
                              constant("alpha", n, 0.25), o);
       },
       [&] {
         NecessityOptions o = moser;
         o.mode = NecessityMode::holder;
         return necessity_run(pl.sp, sh, constant("p", n, 8.0), constant("q", n, kInfinity, true),
                              constant("alpha", n, 0.75), o);
       }},
      {"bounded_positive", [] { return iterative_lemma_check({1, 1, 1}, 1, 2, 1, 1); },
       [] { return iterative_lemma_check({1, 1, 0}, 1, 2, 1, 1); }},
      {"exponents", [] { return iterative_lemma_check({1, 1, 1}, 1, 2, 1, 1); },
       [] { return iterative_lemma_check({1, 1, 1}, 2, 2, 1, 1); }},
      {"parameters", [] { return iterative_lemma_check({1, 1, 1}, 1, 2, 1, 1); },
       // A nonpositive rho or tau also breaks the recursion for positive terms.
       [] { return iterative_lemma_check({1, 1, 1}, 1, 2, -1, 1); }, false},
      {"recursion", [] { return iterative_lemma_check({1, 1, 1}, 1, 2, 1, 1); },
       [] { return iterative_lemma_check({1, 9, 1}, 1, 2, 1, 1); }},
  };
  std::set<std::string> covered;
  for (const auto& c : cases) {
    CAPTURE(c.hypothesis);
    const auto base = c.base();
    CHECK(base.pass());
    const auto broken = c.broken();
    CHECK(broken.verdict == Verdict::not_applicable);
    const Hypothesis* h = find(broken, c.hypothesis);
    REQUIRE(h != nullptr);
    CHECK_FALSE(h->holds);
    if (c.alone)
      for (const auto& other : broken.hypotheses)
        if (other.name != c.hypothesis) CHECK_MESSAGE(other.holds, other.name);
    covered.insert(c.hypothesis);
  }

  // Finite spaces are bounded, doubling and carry finite ball masses; the counterexample parameters are validated
  // up front and out-of-range values raise instead.
  const auto sp6 = grid2d(6, 6, 1.0 / 6);
  const auto g = check_global(sp6, coordinate_function(sp6, 0), constant("s", 36, 1.0), constant("p", 36, 1.0),
                              constant("Q", 36, 2.0), GlobalTheorem::doubling_sob);
  for (const char* name : {"doubling", "unit_ball_mass"}) CHECK(find(g, name)->holds);
  const auto gb = check_global(sp6, coordinate_function(sp6, 0), constant("s", 36, 1.0), constant("p", 36, 1.0),
                               constant("Q", 36, 2.0), GlobalTheorem::bounded);
  CHECK(find(gb, "bounded")->holds);
  // A zero minimal gradient on the dilated ball forces u to be constant on B0, so this one cannot fail either.
  CHECK(find(cases[5].base(), "gradient_positive")->holds);
  covered.insert("gradient_positive");
  // Every hypothesis name the local, Lipschitz and necessity harnesses emit is in the table above.
  for (const auto& rep : {cases[0].base(), cases[5].base(), cases[6].base(), cases[7].base(), cases[11].base(),
                          cases[13].base(), cases[14].base()})
    for (const auto& h : rep.hypotheses) CHECK_MESSAGE(covered.count(h.name), h.name);
}
