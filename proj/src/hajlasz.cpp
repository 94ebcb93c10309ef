#include "varsob/hajlasz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "covering_solver.hpp"
#include "varsob/constants.hpp"
#include "varsob/error.hpp"

namespace varsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pair {
  std::uint32_t i, j;
  double d;
  double du;
  int level;
};

std::vector<Pair> active_pairs(const MetricMeasureSpace& space, const FunctionSample& u) {
  std::vector<Pair> out;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double du = std::fabs(u[i] - u[j]);
      if (!(du > 0.0)) continue;
      const double d = space.distance(i, j);
      out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d, du, pair_level(d)});
    }
  }
  return out;
}

double coefficient(const Pair& pr, double s_x, Coefficient c) {
  return c == Coefficient::distance ? std::pow(pr.d, s_x) : std::pow(2.0, -pr.level * s_x);
}

void check_inputs(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                  const ExponentField& p) {
  require(u.size() == space.size(), "function sample size does not match the space");
  require(s.size() == space.size() && p.size() == space.size(), "exponent field size does not match the space");
  require(!s.has_infinity() && !p.has_infinity(), "s and p must be bounded");
  for (double v : u) require(std::isfinite(v), "function values must be finite");
}

// Root in v of a nonincreasing h(v) = log F(e^v). Slope magnitudes of h lie in [smin, smax] where known
// (smin = 0 when unknown). h may return +inf (F infinite) or -inf (F = 0). Returns the right end of the final
// bracket, i.e. a point with h <= 0 up to tolerance.
double decreasing_log_root(const std::function<double(double)>& h, double v0, double smin, double smax, double tol) {
  double lo = -kInf, hi = kInf, v = v0;
  double prev_v = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int it = 0; it < 200; ++it) {
    const double f = h(v);
    if (f == 0.0) return v;
    if (f > 0.0)
      lo = v;
    else
      hi = v;
    if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= tol) return hi;
    if (std::isfinite(f) && std::fabs(f) <= tol * std::max(smin, 1e-3)) return v;
    double nv;
    if (!std::isfinite(f)) {
      nv = f > 0.0 ? v + 2.0 : v - 2.0;
    } else if (have_prev && std::isfinite(prev_f) && v != prev_v) {
      double slope = (prev_f - f) / (v - prev_v);
      const double floor_slope = smin > 0.0 ? smin : 1e-3;
      if (!(slope > 0.0) || !std::isfinite(slope)) slope = floor_slope;
      slope = std::clamp(slope, floor_slope, smax > 0.0 ? smax : kInf);
      nv = v + f / slope;
    } else {
      nv = v + f / (f > 0.0 ? (smax > 0.0 ? smax : 1.0) : (smin > 0.0 ? smin : 1.0));
    }
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double margin = 1e-3 * (hi - lo);
      if (!(nv > lo + margin && nv < hi - margin)) nv = 0.5 * (lo + hi);
    }
    prev_v = v;
    prev_f = f;
    have_prev = true;
    v = nv;
  }
  return std::isfinite(hi) ? hi : v;
}

detail::SolverOptions solver_options(const GradientOptions& opts) {
  detail::SolverOptions so;
  so.rel_gap = opts.rel_gap;
  return so;
}

// Variables are created lazily per (point, level) so unconstrained entries never enter the solver.
struct VariableMap {
  std::map<std::pair<std::uint32_t, int>, std::uint32_t> index;
  std::vector<std::pair<std::uint32_t, int>> owner;

  std::uint32_t get(std::uint32_t point, int level) {
    auto key = std::make_pair(point, level);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(owner.size());
    index.emplace(key, id);
    owner.push_back(key);
    return id;
  }
};

SequenceSample empty_sequence(const MetricMeasureSpace& space) {
  SequenceSample g;
  if (space.size() < 2) return g;
  const LevelRange lr = active_levels(space);
  g.k_min = lr.k_min;
  g.levels.assign(static_cast<std::size_t>(lr.k_max - lr.k_min + 1), FunctionSample(space.size(), 0.0));
  return g;
}

}  // namespace

int pair_level(double d) {
  require(d > 0.0 && std::isfinite(d), "pair level needs a positive finite distance");
  int e = 0;
  std::frexp(d, &e);  // d = m 2^e with m in [1/2, 1), so 2^{e-1} <= d < 2^e
  return -e;
}

LevelRange active_levels(const MetricMeasureSpace& space) {
  require(space.size() >= 2, "active levels need at least two points");
  LevelRange lr;
  lr.k_min = pair_level(space.diameter());
  lr.k_max = pair_level(space.min_distance());
  return lr;
}

const char* to_string(GradientScale s) { return s == GradientScale::lq_lp ? "lq_lp" : "lp_lq"; }

double scalar_violation(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                        const FunctionSample& g) {
  double worst = 0.0;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = space.distance(i, j);
      const double rhs = std::pow(d, s[i]) * g[i] + std::pow(d, s[j]) * g[j];
      worst = std::max(worst, std::fabs(u[i] - u[j]) - rhs);
    }
  return worst;
}

double vector_violation(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                        const SequenceSample& g, Coefficient c) {
  double worst = 0.0;
  for (const auto& pr : active_pairs(space, u)) {
    double gi = 0.0, gj = 0.0;
    const int idx = pr.level - g.k_min;
    if (!g.empty() && idx >= 0 && idx < static_cast<int>(g.levels.size())) {
      gi = g.levels[static_cast<std::size_t>(idx)][pr.i];
      gj = g.levels[static_cast<std::size_t>(idx)][pr.j];
    }
    const double rhs = coefficient(pr, s[pr.i], c) * gi + coefficient(pr, s[pr.j], c) * gj;
    worst = std::max(worst, pr.du - rhs);
  }
  return worst;
}

NormValue vector_norm(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                      const ExponentField& q, GradientScale scale, double tol) {
  if (scale == GradientScale::lp_lq) return mixed_norm_lp_lq(space, g, p, q, tol);
  if (q.is_constant()) return mixed_norm_lq_lp_constant_q(space, g, p, q.inf(), tol);
  return mixed_norm_lq_lp(space, g, p, q, tol);
}

GradientSolution minimal_scalar_gradient(const MetricMeasureSpace& space, const FunctionSample& u,
                                         const ExponentField& s, const ExponentField& p,
                                         const GradientOptions& opts) {
  check_inputs(space, u, s, p);
  GradientSolution sol;
  sol.g.assign(space.size(), 0.0);
  sol.objective.kind = NormKind::luxemburg;
  const auto pairs = active_pairs(space, u);
  if (pairs.empty()) {
    sol.converged = true;
    return sol;
  }
  VariableMap vars;
  detail::CoverProblem prob;
  for (const auto& pr : pairs) {
    const auto a = vars.get(pr.i, 0), b = vars.get(pr.j, 0);
    prob.rows.push_back({a, b, std::pow(pr.d, s[pr.i]), std::pow(pr.d, s[pr.j]), pr.du});
  }
  prob.num_vars = vars.owner.size();
  for (std::uint32_t v = 0; v < prob.num_vars; ++v) {
    const auto pt = vars.owner[v].first;
    prob.blocks.push_back({{v}, space.weight(pt), p[pt], 1.0, 1.0});
  }
  const detail::NormSearch res = detail::minimize_block_norm(prob, solver_options(opts), opts.tol);
  for (std::uint32_t v = 0; v < prob.num_vars; ++v) sol.g[vars.owner[v].first] = res.x[v];
  sol.objective = luxemburg(space, sol.g, p, opts.tol);
  sol.lower_bound = res.lower;
  sol.certificate = std::max(0.0, scalar_violation(space, u, s, sol.g));
  sol.heuristic = res.heuristic;
  sol.converged = res.converged;
  sol.solves = res.solves;
  sol.iterations = res.iterations;
  return sol;
}

namespace {

GradientSolution triebel_lizorkin(const MetricMeasureSpace& space, const std::vector<Pair>& pairs,
                                  const ExponentField& s, const ExponentField& p, const ExponentField& q,
                                  const GradientOptions& opts) {
  GradientSolution sol;
  sol.vector = true;
  sol.levels = empty_sequence(space);
  VariableMap vars;
  detail::CoverProblem prob;
  for (const auto& pr : pairs) {
    const auto a = vars.get(pr.i, pr.level), b = vars.get(pr.j, pr.level);
    prob.rows.push_back({a, b, coefficient(pr, s[pr.i], opts.coefficient), coefficient(pr, s[pr.j], opts.coefficient),
                         pr.du});
  }
  prob.num_vars = vars.owner.size();
  std::map<std::uint32_t, std::vector<std::uint32_t>> per_point;
  for (std::uint32_t v = 0; v < prob.num_vars; ++v) per_point[vars.owner[v].first].push_back(v);
  for (const auto& [pt, list] : per_point) prob.blocks.push_back({list, space.weight(pt), p[pt], q[pt], 1.0});
  const detail::NormSearch res = detail::minimize_block_norm(prob, solver_options(opts), opts.tol);
  for (std::uint32_t v = 0; v < prob.num_vars; ++v) {
    const auto [pt, level] = vars.owner[v];
    sol.levels.levels[static_cast<std::size_t>(level - sol.levels.k_min)][pt] = res.x[v];
  }
  sol.lower_bound = res.lower;
  sol.heuristic = res.heuristic;
  sol.converged = res.converged;
  sol.solves = res.solves;
  sol.iterations = res.iterations;
  return sol;
}

struct LevelProblem {
  int level = 0;
  detail::CoverProblem prob;
  std::vector<std::uint32_t> points;  // variable -> point
};

std::vector<LevelProblem> split_levels(const MetricMeasureSpace& space, const std::vector<Pair>& pairs,
                                       const ExponentField& s, const ExponentField& p, Coefficient c) {
  std::map<int, std::vector<const Pair*>> by_level;
  for (const auto& pr : pairs) by_level[pr.level].push_back(&pr);
  std::vector<LevelProblem> out;
  for (const auto& [level, list] : by_level) {
    LevelProblem lp;
    lp.level = level;
    std::map<std::uint32_t, std::uint32_t> local;
    auto id = [&](std::uint32_t pt) {
      auto it = local.find(pt);
      if (it != local.end()) return it->second;
      const auto v = static_cast<std::uint32_t>(lp.points.size());
      local.emplace(pt, v);
      lp.points.push_back(pt);
      return v;
    };
    for (const Pair* pr : list) {
      const auto a = id(pr->i), b = id(pr->j);
      lp.prob.rows.push_back({a, b, coefficient(*pr, s[pr->i], c), coefficient(*pr, s[pr->j], c), pr->du});
    }
    lp.prob.num_vars = lp.points.size();
    for (std::uint32_t v = 0; v < lp.prob.num_vars; ++v)
      lp.prob.blocks.push_back({{v}, space.weight(lp.points[v]), p[lp.points[v]], 1.0, 1.0});
    out.push_back(std::move(lp));
  }
  return out;
}

GradientSolution besov(const MetricMeasureSpace& space, const std::vector<Pair>& pairs, const ExponentField& s,
                       const ExponentField& p, const ExponentField& q, const GradientOptions& opts) {
  GradientSolution sol;
  sol.vector = true;
  sol.levels = empty_sequence(space);
  sol.converged = true;
  auto levels = split_levels(space, pairs, s, p, opts.coefficient);
  const auto so = solver_options(opts);
  auto store = [&](const LevelProblem& lp, const std::vector<double>& x) {
    auto& row = sol.levels.levels[static_cast<std::size_t>(lp.level - sol.levels.k_min)];
    for (std::uint32_t v = 0; v < lp.prob.num_vars; ++v) row[lp.points[v]] = x[v];
  };

  if (q.is_constant()) {
    // Levels decouple completely: the norm is the l^q norm of the per-level minimal L^p norms.
    const double qc = q.inf();
    double acc_hi = 0.0, acc_lo = 0.0;
    for (auto& lp : levels) {
      const detail::NormSearch res = detail::minimize_block_norm(lp.prob, so, opts.tol);
      store(lp, res.x);
      sol.solves += res.solves;
      sol.iterations += res.iterations;
      sol.converged = sol.converged && res.converged;
      sol.heuristic = sol.heuristic || res.heuristic;
      if (qc == kInf) {
        acc_hi = std::max(acc_hi, res.upper);
        acc_lo = std::max(acc_lo, res.lower);
      } else {
        acc_hi += std::pow(res.upper, qc);
        acc_lo += std::pow(res.lower, qc);
      }
    }
    sol.lower_bound = qc == kInf ? acc_lo : std::pow(acc_lo, 1.0 / qc);
    return sol;
  }

  // Variable q: for an outer scale mu, level k contributes lambda_k(mu) = inf{lambda : min_g rho_p(g / (mu
  // lambda^{1/q})) <= 1}; mu is then fixed by sum_k lambda_k(mu) = 1.
  const double p_lo = p.inf(), p_hi = p.sup();
  const double q_lo = q.inf(), q_hi = q.sup();
  auto set_scales = [&](LevelProblem& lp, double mu, double lambda) {
    for (std::uint32_t v = 0; v < lp.prob.num_vars; ++v) {
      const double qi = q[lp.points[v]];
      lp.prob.blocks[v].t = mu * (qi == kInf ? 1.0 : std::pow(lambda, 1.0 / qi));
    }
  };
  auto level_value = [&](LevelProblem& lp, double mu, double lambda, std::vector<double>* x) {
    set_scales(lp, mu, lambda);
    const detail::CoverSolution cs = detail::solve_cover(lp.prob, so);
    ++sol.solves;
    sol.iterations += cs.iterations;
    sol.converged = sol.converged && cs.converged;
    sol.heuristic = sol.heuristic || cs.heuristic;
    if (x) *x = cs.x;
    return cs.primal;
  };
  auto level_lambda = [&](LevelProblem& lp, double mu) {
    bool all_inf = true;
    for (auto pt : lp.points) all_inf = all_inf && q[pt] == kInf;
    if (all_inf) return level_value(lp, mu, 1.0, nullptr) <= 1.0 ? 0.0 : kInf;
    const double smin = q_hi == kInf ? 0.0 : p_lo / q_hi;
    const double smax = p_hi / q_lo;
    auto h = [&](double v) {
      const double f = level_value(lp, mu, std::exp(v), nullptr);
      return f > 0.0 ? std::log(f) : -kInf;
    };
    const double v = decreasing_log_root(h, 0.0, smin, smax, 0.1 * opts.tol);
    const double f = level_value(lp, mu, std::exp(v), nullptr);
    return f <= 1.0 + 1e-6 ? std::exp(v) : kInf;
  };
  auto outer = [&](double w) {
    const double mu = std::exp(w);
    double acc = 0.0;
    for (auto& lp : levels) {
      acc += level_lambda(lp, mu);
      if (!std::isfinite(acc)) return kInf;
    }
    return acc > 0.0 ? std::log(acc) : -kInf;
  };
  const double smin_outer = q_lo;
  const double smax_outer = q_hi == kInf ? 0.0 : q_hi;
  const double w = decreasing_log_root(outer, 0.0, smin_outer, smax_outer, opts.tol);
  const double mu = std::exp(w);
  for (auto& lp : levels) {
    const double lam = level_lambda(lp, mu);
    std::vector<double> x;
    level_value(lp, mu, std::isfinite(lam) ? lam : 1.0, &x);
    store(lp, x);
  }
  return sol;
}

}  // namespace

GradientSolution minimal_vector_gradient(const MetricMeasureSpace& space, const FunctionSample& u,
                                         const ExponentField& s, const ExponentField& p, const ExponentField& q,
                                         GradientScale scale, const GradientOptions& opts) {
  check_inputs(space, u, s, p);
  require(q.size() == space.size(), "exponent field size does not match the space");
  const auto pairs = active_pairs(space, u);
  GradientSolution sol;
  if (pairs.empty()) {
    sol.vector = true;
    sol.levels = empty_sequence(space);
    sol.converged = true;
    sol.objective.kind = scale == GradientScale::lp_lq ? NormKind::mixed_plq : NormKind::mixed_lqp;
    return sol;
  }
  sol = scale == GradientScale::lp_lq ? triebel_lizorkin(space, pairs, s, p, q, opts)
                                      : besov(space, pairs, s, p, q, opts);
  sol.objective = vector_norm(space, sol.levels, p, q, scale, opts.tol);
  sol.certificate = std::max(0.0, vector_violation(space, u, s, sol.levels, opts.coefficient));
  return sol;
}

VerificationReport norm_convention_equivalence(const MetricMeasureSpace& space, const FunctionSample& u,
                                               const ExponentField& s, const ExponentField& p,
                                               const ExponentField& q, GradientScale scale,
                                               const GradientOptions& opts) {
  VerificationReport rep;
  rep.theorem = "norm_convention_equivalence";
  GradientOptions alt_opts = opts;
  alt_opts.coefficient = Coefficient::dyadic;
  GradientOptions std_opts = opts;
  std_opts.coefficient = Coefficient::distance;
  const GradientSolution standard = minimal_vector_gradient(space, u, s, p, q, scale, std_opts);
  const GradientSolution alt = minimal_vector_gradient(space, u, s, p, q, scale, alt_opts);
  rep.add_hypothesis("convex_instance", !standard.heuristic && !alt.heuristic,
                     "both minimisations certified only for p^- >= 1 and q^- >= 1");
  const double factor = std::pow(2.0, s.sup());
  rep.values["norm"] = standard.objective.value;
  rep.values["norm_alternative"] = alt.objective.value;
  rep.values["factor"] = factor;
  rep.values["ratio"] = alt.objective.value > 0.0 ? standard.objective.value / alt.objective.value : 1.0;
  rep.lhs = standard.objective.value;
  rep.rhs = factor * alt.objective.value;
  rep.constant_used = factor;
  rep.constant_provenance = "formula";
  rep.conclude();
  // Lower half of the equivalence: the alternative norm never exceeds the standard one.
  const double lower_margin = standard.objective.value - alt.objective.value;
  rep.values["lower_margin"] = lower_margin;
  if (rep.verdict == Verdict::pass && lower_margin < -default_slack(standard.objective.value))
    rep.verdict = Verdict::fail;
  return rep;
}

double gradient_zero_constant(const MetricMeasureSpace& space, const ExponentField& s, const ExponentField& p) {
  double c = 0.0;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = space.distance(i, j);
      c = std::max(c, std::pow(d, s[i]) * std::pow(space.weight(i), -1.0 / p[i]) +
                          std::pow(d, s[j]) * std::pow(space.weight(j), -1.0 / p[j]));
    }
  return c;
}

VerificationReport gradient_zero_implies_constant(const MetricMeasureSpace& space, const FunctionSample& u,
                                                  const ExponentField& s, const ExponentField& p, double tol,
                                                  const GradientOptions& opts) {
  VerificationReport rep;
  rep.theorem = "gradient_zero";
  const GradientSolution sol = minimal_scalar_gradient(space, u, s, p, opts);
  double spread = 0.0, scale = 1.0;
  for (double v : u) scale = std::max(scale, std::fabs(v));
  if (!u.empty()) {
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    spread = *hi - *lo;
  }
  const double c = gradient_zero_constant(space, s, p);
  rep.values["objective"] = sol.objective.value;
  rep.values["premise"] = sol.objective.value <= tol * scale ? 1.0 : 0.0;
  rep.values["certificate"] = sol.certificate;
  rep.lhs = spread;
  rep.rhs = c * sol.objective.value;
  rep.constant_used = c;
  rep.constant_provenance = "formula";
  rep.notes["form"] = "max|u(x)-u(y)| <= C ||g||_p for the returned gradient; premise flags a near-zero gradient";
  rep.conclude();
  return rep;
}

int cutoff_threshold_level(double lipschitz) {
  require(lipschitz > 0.0 && std::isfinite(lipschitz), "Lipschitz constant must be positive and finite");
  int e = 0;
  std::frexp(lipschitz, &e);  // 2^{e-1} <= L < 2^e
  return e;
}

double cutoff_level_value(double lipschitz, int k_l, int k, double s_x) {
  if (k >= k_l) return lipschitz * std::pow(2.0, k * (s_x - 1.0));
  return std::pow(2.0, (k + 1) * s_x + 1.0);
}

double cutoff_norm(const MetricMeasureSpace& space, const PointSet& b, double lipschitz, const ExponentField& s,
                   const ExponentField& p, const ExponentField& q, GradientScale scale, double tol) {
  if (b.empty()) return 0.0;
  const std::size_t n = space.size();
  const int k_l = cutoff_threshold_level(lipschitz);
  const double lk = k_l;
  if (scale == GradientScale::lp_lq) {
    // Pointwise l^{q(x)} norms over all k in Z by the two geometric series.
    FunctionSample pointwise(n, 0.0);
    for (auto x : b) {
      const double sx = s[x], qx = q[x];
      if (qx == kInf) {
        pointwise[x] = std::max(std::pow(2.0, lk * sx + 1.0), lipschitz * std::pow(2.0, lk * (sx - 1.0)));
      } else {
        const double low = std::pow(2.0, qx) * std::pow(2.0, lk * sx * qx) / (1.0 - std::pow(2.0, -sx * qx));
        const double high = sx < 1.0 ? std::pow(lipschitz, qx) * std::pow(2.0, lk * (sx - 1.0) * qx) /
                                           (1.0 - std::pow(2.0, (sx - 1.0) * qx))
                                     : kInf;
        pointwise[x] = std::pow(low + high, 1.0 / qx);
      }
    }
    return luxemburg(space, pointwise, p, tol).value;
  }
  // Level norms decay geometrically on both sides of k_L; the window stops once terms fall below 2^{-70}.
  const Bounds sb = restricted_bounds(s, b);
  const int below = static_cast<int>(std::ceil(70.0 / sb.inf)) + 2;
  const int above = sb.sup < 1.0 ? static_cast<int>(std::ceil(70.0 / (1.0 - sb.sup))) + 2 : 2;
  SequenceSample window;
  window.k_min = k_l - below;
  for (int k = window.k_min; k <= k_l + above; ++k) {
    FunctionSample lev(n, 0.0);
    for (auto x : b) lev[x] = cutoff_level_value(lipschitz, k_l, k, s[x]);
    window.levels.push_back(std::move(lev));
  }
  if (q.is_constant()) return mixed_norm_lq_lp_constant_q(space, window, p, q.inf(), tol).value;
  if (!q.has_infinity()) return mixed_norm_lq_lp_closed(space, window, p, q, tol).value;
  return mixed_norm_lq_lp(space, window, p, q, tol).value;
}

CutoffGradient lipschitz_cutoff_gradient(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& b,
                                         double lipschitz, const ExponentField& s, const ExponentField& p,
                                         const ExponentField& q, double tol) {
  require(u.size() == space.size(), "function sample size does not match the space");
  const double q_minus = q.inf();
  require(s.sup() < 1.0 || (s.sup() <= 1.0 && q_minus == kInf), "cut-off gradient needs s^+ < 1 unless q^- is infinite");
  CutoffGradient out;
  out.k_l = cutoff_threshold_level(lipschitz);
  const std::size_t n = space.size();
  std::vector<char> in_b(n, 0);
  for (auto x : b) {
    require(x < n, "cut-off support contains an index out of range");
    in_b[x] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.lipschitz_measured = std::max(out.lipschitz_measured, std::fabs(u[i] - u[j]) / space.distance(i, j));

  if (n >= 2) {
    out.levels = empty_sequence(space);
    for (std::size_t idx = 0; idx < out.levels.levels.size(); ++idx) {
      const int k = out.levels.k_min + static_cast<int>(idx);
      for (std::size_t x = 0; x < n; ++x)
        if (in_b[x]) out.levels.levels[idx][x] = cutoff_level_value(lipschitz, out.k_l, k, s[x]);
    }
    out.certificate = std::max(0.0, vector_violation(space, u, s, out.levels));
  }
  if (b.empty()) return out;

  const double s_lo = restricted_bounds(s, b).inf, s_hi = restricted_bounds(s, b).sup;
  FunctionSample chi(n, 0.0);
  for (auto x : b) chi[x] = 1.0;
  const double chi_norm = luxemburg(space, chi, p, tol).value;
  const double factor = std::max(std::pow(lipschitz, s_lo), std::pow(lipschitz, s_hi)) * chi_norm;
  if (q_minus == kInf) {
    out.tl_bound = constants::kLipschitzSupPointwise * factor;
    out.besov_bound = constants::kLipschitzSupLevels * factor;
  } else {
    out.a1 = constants::lipschitz_a1(q_minus, s.inf(), s.sup());
    out.a2 = constants::lipschitz_a2(q_minus, s.inf(), s.sup());
    out.a2_printed = constants::lipschitz_a2_printed(q_minus, s.inf(), s.sup());
    out.tl_bound = out.a1 * factor;
    out.besov_bound = out.a2 * factor;
  }

  out.tl_norm = cutoff_norm(space, b, lipschitz, s, p, q, GradientScale::lp_lq, tol);
  out.besov_norm = cutoff_norm(space, b, lipschitz, s, p, q, GradientScale::lq_lp, tol);
  return out;
}

VerificationReport lipschitz_cutoff_check(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& b,
                                          double lipschitz, const ExponentField& s, const ExponentField& p,
                                          const ExponentField& q, double tol) {
  VerificationReport rep;
  rep.theorem = "lipschitz_cutoff";
  const bool exponent_ok = s.sup() < 1.0 || (s.sup() <= 1.0 && q.inf() == kInf);
  rep.add_hypothesis("s_plus_below_one", exponent_ok, "s^+ < 1, or s^+ <= 1 when q^- is infinite");
  bool range_ok = true, support_ok = true;
  std::vector<char> in_b(space.size(), 0);
  for (auto x : b) in_b[x] = 1;
  for (std::size_t x = 0; x < space.size(); ++x) {
    range_ok = range_ok && u[x] >= 0.0 && u[x] <= 1.0;
    if (!in_b[x]) support_ok = support_ok && u[x] == 0.0;
  }
  rep.add_hypothesis("values_in_unit_interval", range_ok);
  rep.add_hypothesis("supported_in_b", support_ok);
  if (!exponent_ok) {
    rep.conclude();
    return rep;
  }
  const CutoffGradient cg = lipschitz_cutoff_gradient(space, u, b, lipschitz, s, p, q, tol);
  rep.add_hypothesis("lipschitz", cg.lipschitz_measured <= lipschitz * (1.0 + 1e-12),
                     "measured Lipschitz constant " + std::to_string(cg.lipschitz_measured));
  rep.values["k_l"] = cg.k_l;
  rep.values["certificate"] = cg.certificate;
  rep.values["tl_norm"] = cg.tl_norm;
  rep.values["tl_bound"] = cg.tl_bound;
  rep.values["besov_norm"] = cg.besov_norm;
  rep.values["besov_bound"] = cg.besov_bound;
  rep.values["a1"] = cg.a1;
  rep.values["a2"] = cg.a2;
  rep.values["a2_printed"] = cg.a2_printed;
  const double r1 = cg.tl_bound > 0.0 ? cg.tl_norm / cg.tl_bound : 0.0;
  const double r2 = cg.besov_bound > 0.0 ? cg.besov_norm / cg.besov_bound : 0.0;
  rep.values["tl_ratio"] = r1;
  rep.values["besov_ratio"] = r2;
  rep.lhs = std::max(r1, r2);
  rep.rhs = 1.0;
  rep.constant_used = cg.a1;
  rep.constant_provenance = "formula";
  rep.conclude();
  if (rep.verdict == Verdict::pass && cg.certificate > 1e-9) rep.verdict = Verdict::fail;
  return rep;
}

VerificationReport iterative_lemma_check(const std::vector<double>& a, double p, double q, double rho, double tau) {
  VerificationReport rep;
  rep.theorem = "iterative_lemma";
  require(!a.empty(), "iterative lemma needs a nonempty sequence");
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  rep.add_hypothesis("bounded_positive", *lo > 0.0 && std::isfinite(*hi));
  rep.add_hypothesis("exponents", 0.0 < p && p < q && std::isfinite(q));
  rep.add_hypothesis("parameters", rho > 0.0 && tau > 0.0);
  bool recursion = true;
  std::size_t witness = 0;
  for (std::size_t j = 0; j + 1 < a.size() && recursion; ++j) {
    // Indices are 1-based in the recursion a_{j+1}^{1/q} <= rho tau^j a_j^{1/p}.
    const double lhs = std::pow(a[j + 1], 1.0 / q);
    const double rhs = rho * std::pow(tau, static_cast<double>(j + 1)) * std::pow(a[j], 1.0 / p);
    if (lhs > rhs * (1.0 + 1e-12)) {
      recursion = false;
      witness = j + 1;
    }
  }
  rep.add_hypothesis("recursion", recursion,
                     recursion ? "holds on the supplied prefix" : "fails at j=" + std::to_string(witness));
  rep.lhs = 1.0;
  rep.rhs = std::pow(a[0], 1.0 - p / q) * std::pow(rho, p) * std::pow(tau, p * q / (q - p));
  rep.conclude(1e-12);
  return rep;
}

}  // namespace varsob
