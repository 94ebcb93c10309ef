#include "varsob/varnorms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "varsob/error.hpp"

namespace varsob {

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::modular: return "modular";
    case NormKind::luxemburg: return "luxemburg";
    case NormKind::mixed_lqp: return "mixed_lqp";
    case NormKind::mixed_plq: return "mixed_plq";
    case NormKind::holder_seminorm: return "holder_seminorm";
    case NormKind::sup_norm: return "sup_norm";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "unknown";
}

NormValue monotone_root(const std::function<double(double)>& f, double hint, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  NormValue out;
  double hi = (hint > 0.0 && std::isfinite(hint)) ? hint : 1.0;
  int guard = 0;
  while (!(f(hi) <= 1.0)) {
    hi *= 2.0;
    if (++guard > 2100 || !std::isfinite(hi)) {
      out.value = kInfinity;
      out.tolerance = 0.0;
      return out;
    }
  }
  double lo = hi;
  guard = 0;
  while (f(lo) <= 1.0) {
    lo *= 0.5;
    if (++guard > 2100 || lo == 0.0) {
      out.value = 0.0;
      out.tolerance = 0.0;
      return out;
    }
  }
  if (lo * 2.0 < hi) lo = std::max(lo, 0.0);
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  out.value = hi;
  out.tolerance = hi - lo;
  return out;
}

double modular(const std::vector<double>& weights, const FunctionSample& u, const std::vector<double>& p) {
  require(weights.size() == u.size() && p.size() == u.size(), "modular: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::fabs(u[i]);
    if (a == 0.0) continue;
    acc += weights[i] * std::pow(a, p[i]);
  }
  return acc;
}

double modular(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p) {
  require(u.size() == space.size() && p.size() == space.size(), "modular: size does not match the space");
  require(!p.has_infinity(), "Lebesgue exponent must be bounded", ErrorCode::domain);
  return modular(space.weights(), u, p.values());
}

NormValue luxemburg(const std::vector<double>& weights, const FunctionSample& u, const std::vector<double>& p,
                    double tol) {
  require(weights.size() == u.size() && p.size() == u.size(), "luxemburg: length mismatch");
  double top = 0.0;
  for (double v : u) top = std::max(top, std::fabs(v));
  if (top == 0.0) return NormValue{0.0, 0.0, NormKind::luxemburg};
  std::vector<double> scaled(u.size());
  auto f = [&](double lambda) {
    for (std::size_t i = 0; i < u.size(); ++i) scaled[i] = u[i] / lambda;
    return modular(weights, scaled, p);
  };
  NormValue nv = monotone_root(f, top, tol);
  nv.kind = NormKind::luxemburg;
  return nv;
}

NormValue luxemburg(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p, double tol) {
  require(u.size() == space.size() && p.size() == space.size(), "luxemburg: size does not match the space");
  require(!p.has_infinity(), "Lebesgue exponent must be bounded", ErrorCode::domain);
  return luxemburg(space.weights(), u, p.values(), tol);
}

double unit_norm(const MetricMeasureSpace& space, const ExponentField& p, double tol) {
  return luxemburg(space, FunctionSample(space.size(), 1.0), p, tol).value;
}

VerificationReport rel_sandwich_check(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p,
                                      double tol) {
  VerificationReport rep;
  rep.theorem = "rel_sandwich";
  const double rho = modular(space, u, p);
  const double norm = luxemburg(space, u, p, tol).value;
  const double a = std::pow(rho, 1.0 / p.inf());
  const double b = std::pow(rho, 1.0 / p.sup());
  const double lower = std::min(a, b);
  const double upper = std::max(a, b);
  rep.values["modular"] = rho;
  rep.values["norm"] = norm;
  rep.values["lower"] = lower;
  rep.values["upper"] = upper;
  const double slack = 1e-8 + 1e-6 * upper;
  rep.values["margin_lower"] = norm - lower;
  rep.values["margin_upper"] = upper - norm;
  // The tighter of the two sides is reported as lhs/rhs.
  if (norm - lower < upper - norm) {
    rep.lhs = lower;
    rep.rhs = norm;
  } else {
    rep.lhs = norm;
    rep.rhs = upper;
  }
  rep.conclude(slack);
  return rep;
}

VerificationReport holder_inequality_check(const MetricMeasureSpace& space, const FunctionSample& f,
                                           const FunctionSample& g, const ExponentField& p, double tol) {
  require(p.inf() > 1.0, "Hoelder inequality needs p^- > 1", ErrorCode::domain);
  require(f.size() == space.size() && g.size() == space.size(), "holder check: size mismatch");
  VerificationReport rep;
  rep.theorem = "holder_inequality";
  double lhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) lhs += space.weight(i) * std::fabs(f[i] * g[i]);
  const ExponentField pc = conjugate(p);
  const double nf = luxemburg(space, f, p, tol).value;
  const double ng = luxemburg(space, g, pc, tol).value;
  rep.lhs = lhs;
  rep.rhs = 2.0 * nf * ng;
  rep.constant_used = 2.0;
  rep.constant_provenance = "formula";
  rep.values["norm_f"] = nf;
  rep.values["norm_g_conjugate"] = ng;
  rep.values["ratio"] = rep.rhs > 0.0 ? lhs / rep.rhs : 0.0;
  rep.conclude();
  return rep;
}

double lebesgue_embedding_constant(const ExponentField& p, const ExponentField& q, const MetricMeasureSpace& space,
                                   double tol) {
  require(p.size() == space.size() && q.size() == space.size(), "embedding constant: size mismatch");
  require(strictly_dominates(q, p), "Lebesgue embedding constant needs q >> p", ErrorCode::domain);
  std::vector<double> tc(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = q[i] / p[i];
    tc[i] = t / (t - 1.0);
  }
  const double one = unit_norm(space, ExponentField("t'", tc), tol);
  return std::pow(2.0, 1.0 / p.inf()) * std::max(std::pow(one, 1.0 / p.sup()), std::pow(one, 1.0 / p.inf()));
}

namespace {

void check_sequence(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                    const ExponentField& q) {
  require(p.size() == space.size() && q.size() == space.size(), "mixed norm: exponent size mismatch");
  require(!p.has_infinity(), "Lebesgue exponent must be bounded", ErrorCode::domain);
  for (const auto& level : g.levels) require(level.size() == space.size(), "mixed norm: level size mismatch");
}

// inf{lambda > 0 : rho_p(g / lambda^{1/q}) <= 1} with lambda^{1/inf} = 1.
double level_infimum(const MetricMeasureSpace& space, const FunctionSample& g, const ExponentField& p,
                     const ExponentField& q, double tol) {
  double fixed = 0.0;
  bool moving = false;
  double top = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = std::fabs(g[i]);
    if (a == 0.0) continue;
    if (q[i] == kInfinity) {
      fixed += space.weight(i) * std::pow(a, p[i]);
    } else {
      moving = true;
      top = std::max(top, std::pow(a, q[i]));
    }
  }
  if (fixed > 1.0) return kInfinity;
  if (!moving) return 0.0;
  auto f = [&](double lambda) {
    double acc = fixed;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = std::fabs(g[i]);
      if (a == 0.0 || q[i] == kInfinity) continue;
      acc += space.weight(i) * std::pow(a / std::pow(lambda, 1.0 / q[i]), p[i]);
    }
    return acc;
  };
  return monotone_root(f, top, tol).value;
}

SequenceSample scaled(const SequenceSample& g, double factor) {
  SequenceSample out = g;
  for (auto& level : out.levels)
    for (double& v : level) v *= factor;
  return out;
}

double sequence_top(const SequenceSample& g) {
  double top = 0.0;
  for (const auto& level : g.levels)
    for (double v : level) top = std::max(top, std::fabs(v));
  return top;
}

}  // namespace

double mixed_modular_lq_lp(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol) {
  check_sequence(space, g, p, q);
  double acc = 0.0;
  for (const auto& level : g.levels) acc += level_infimum(space, level, p, q, tol);
  return acc;
}

double mixed_modular_lq_lp_closed(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                  const ExponentField& q, double tol) {
  check_sequence(space, g, p, q);
  require(!q.has_infinity(), "closed form needs q^+ < infinity", ErrorCode::domain);
  std::vector<double> ratio(space.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = p[i] / q[i];
  double acc = 0.0;
  FunctionSample power(space.size());
  for (const auto& level : g.levels) {
    for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::pow(std::fabs(level[i]), q[i]);
    acc += luxemburg(space.weights(), power, ratio, tol).value;
  }
  return acc;
}

NormValue mixed_norm_lq_lp(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol) {
  check_sequence(space, g, p, q);
  const double top = sequence_top(g);
  if (top == 0.0) return NormValue{0.0, 0.0, NormKind::mixed_lqp};
  const double inner = std::min(1e-13, tol * 1e-3);
  auto f = [&](double lambda) { return mixed_modular_lq_lp(space, scaled(g, 1.0 / lambda), p, q, inner); };
  NormValue nv = monotone_root(f, top, tol);
  nv.kind = NormKind::mixed_lqp;
  return nv;
}

NormValue mixed_norm_lq_lp_closed(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                  const ExponentField& q, double tol) {
  check_sequence(space, g, p, q);
  const double top = sequence_top(g);
  if (top == 0.0) return NormValue{0.0, 0.0, NormKind::mixed_lqp};
  const double inner = std::min(1e-13, tol * 1e-3);
  auto f = [&](double lambda) { return mixed_modular_lq_lp_closed(space, scaled(g, 1.0 / lambda), p, q, inner); };
  NormValue nv = monotone_root(f, top, tol);
  nv.kind = NormKind::mixed_lqp;
  return nv;
}

NormValue mixed_norm_lq_lp_constant_q(const MetricMeasureSpace& space, const SequenceSample& g,
                                      const ExponentField& p, double q, double tol) {
  check_sequence(space, g, p, ExponentField::constant("q", space.size(), q, true));
  double acc = 0.0;
  double width = 0.0;
  for (const auto& level : g.levels) {
    const NormValue nv = luxemburg(space, level, p, tol * 1e-2);
    width = std::max(width, nv.tolerance);
    if (q == kInfinity)
      acc = std::max(acc, nv.value);
    else
      acc += std::pow(nv.value, q);
  }
  const double value = (q == kInfinity) ? acc : std::pow(acc, 1.0 / q);
  return NormValue{value, width, NormKind::mixed_lqp};
}

FunctionSample pointwise_lq(const SequenceSample& g, const ExponentField& q) {
  const std::size_t n = q.size();
  FunctionSample out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    if (q[i] == kInfinity) {
      for (const auto& level : g.levels) acc = std::max(acc, std::fabs(level.at(i)));
      out[i] = acc;
    } else {
      // Scale by the largest entry to keep large exponents finite.
      double top = 0.0;
      for (const auto& level : g.levels) top = std::max(top, std::fabs(level.at(i)));
      if (top == 0.0) continue;
      for (const auto& level : g.levels) acc += std::pow(std::fabs(level[i]) / top, q[i]);
      out[i] = top * std::pow(acc, 1.0 / q[i]);
    }
  }
  return out;
}

NormValue mixed_norm_lp_lq(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol) {
  check_sequence(space, g, p, q);
  NormValue nv = luxemburg(space, pointwise_lq(g, q), p, tol);
  nv.kind = NormKind::mixed_plq;
  return nv;
}

double mixed_modular_lp_lq(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q) {
  check_sequence(space, g, p, q);
  return modular(space, pointwise_lq(g, q), p);
}

VerificationReport monotonicity_check(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                      const ExponentField& q1, const ExponentField& q2, double tol) {
  VerificationReport rep;
  rep.theorem = "monotonicity";
  bool ordered = q1.size() == q2.size();
  for (std::size_t i = 0; ordered && i < q1.size(); ++i) ordered = q1[i] <= q2[i];
  rep.add_hypothesis("q1 <= q2", ordered);
  const double b1 = mixed_norm_lq_lp(space, g, p, q1, tol).value;
  const double b2 = mixed_norm_lq_lp(space, g, p, q2, tol).value;
  const double t1 = mixed_norm_lp_lq(space, g, p, q1, tol).value;
  const double t2 = mixed_norm_lp_lq(space, g, p, q2, tol).value;
  rep.values["besov_q1"] = b1;
  rep.values["besov_q2"] = b2;
  rep.values["tl_q1"] = t1;
  rep.values["tl_q2"] = t2;
  const double margin_b = b1 - b2;
  const double margin_t = t1 - t2;
  rep.values["margin_besov"] = margin_b;
  rep.values["margin_tl"] = margin_t;
  if (margin_b - default_slack(b1) < margin_t - default_slack(t1)) {
    rep.lhs = b2;
    rep.rhs = b1;
  } else {
    rep.lhs = t2;
    rep.rhs = t1;
  }
  rep.constant_used = 1.0;
  rep.constant_provenance = "formula";
  rep.conclude();
  return rep;
}

double holder_seminorm(const FunctionSample& u, const ExponentField& alpha, const MetricMeasureSpace& space) {
  require(u.size() == space.size() && alpha.size() == space.size(), "holder seminorm: size mismatch");
  require(!alpha.has_infinity(), "Hoelder exponent must be bounded", ErrorCode::domain);
  double best = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x)
    for (std::size_t y = 0; y < u.size(); ++y) {
      if (x == y) continue;
      const double diff = std::fabs(u[x] - u[y]);
      if (diff == 0.0) continue;
      best = std::max(best, diff / std::pow(space.distance(x, y), alpha[x]));
    }
  return best;
}

double sup_norm(const FunctionSample& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  return m;
}

double median(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& points) {
  require(!points.empty(), "median needs a nonempty set");
  require(u.size() == space.size(), "median: size mismatch");
  std::vector<std::size_t> idx(points);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  double total = 0.0;
  for (std::size_t i : idx) total += space.weight(i);
  const double half = 0.5 * total;
  const double eps = 1e-13 * total;
  // mu({u < t}) equals the mass of values <= v_k for t in (v_k, v_{k+1}].
  double cum = 0.0;
  std::size_t k = 0;
  while (k < idx.size()) {
    const double level = u[idx[k]];
    double next_cum = cum;
    std::size_t j = k;
    while (j < idx.size() && u[idx[j]] == level) next_cum += space.weight(idx[j++]);
    if (next_cum > half + eps) return level;
    cum = next_cum;
    k = j;
  }
  return u[idx.back()];
}

double median_factor(double measure, double p_minus) { return std::max(2.0, std::pow(2.0 / measure, 1.0 / p_minus)); }

VerificationReport median_bound_check(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& points,
                                      const ExponentField& p, double c, double tol) {
  VerificationReport rep;
  rep.theorem = "median_bound";
  const double m = median(space, u, points);
  const double mass = space.measure(points);
  const Bounds pb = restricted_bounds(p, points);
  const double factor = median_factor(mass, pb.inf);
  FunctionSample diff;
  std::vector<double> w, pe;
  for (std::size_t i : points) {
    diff.push_back(u[i] - c);
    w.push_back(space.weight(i));
    pe.push_back(p[i]);
  }
  const double norm = luxemburg(w, diff, pe, tol).value;
  rep.lhs = std::fabs(m - c);
  rep.rhs = factor * norm;
  rep.constant_used = factor;
  rep.constant_provenance = "formula";
  rep.values["median"] = m;
  rep.values["norm"] = norm;
  rep.conclude();
  return rep;
}

FunctionSample restrict_values(const FunctionSample& u, const PointSet& points) {
  FunctionSample out;
  out.reserve(points.size());
  for (std::size_t i : points) out.push_back(u.at(i));
  return out;
}

PointSet all_points(const MetricMeasureSpace& space) {
  PointSet p(space.size());
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

}  // namespace varsob
