#include "varsob/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "varsob/error.hpp"

namespace varsob {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void same_length(const ExponentField& a, const ExponentField& b) {
  require(a.size() == b.size(), "exponent fields '" + a.name() + "' and '" + b.name() + "' differ in length");
}

void finite_only(const ExponentField& f) {
  require(!f.has_infinity(), "exponent '" + f.name() + "' carries an infinite value where only finite ones are allowed",
          ErrorCode::domain);
}

}  // namespace

ExponentField::ExponentField(std::string name, std::vector<double> values, bool allow_infinity)
    : name_(std::move(name)), values_(std::move(values)) {
  require(!values_.empty(), "exponent '" + name_ + "' has no values");
  inf_ = kInfinity;
  sup_ = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    const bool ok = v > 0.0 && (std::isfinite(v) || (allow_infinity && v == kInfinity));
    require(ok, "exponent '" + name_ + "' has invalid value " + num(v) + " at point " + std::to_string(i),
            ErrorCode::domain);
    inf_ = std::min(inf_, v);
    sup_ = std::max(sup_, v);
  }
}

ExponentField ExponentField::constant(std::string name, std::size_t n, double value, bool allow_infinity) {
  return ExponentField(std::move(name), std::vector<double>(n, value), allow_infinity);
}

ExponentField ExponentField::restrict_to(const PointSet& points) const {
  std::vector<double> v;
  v.reserve(points.size());
  for (std::size_t p : points) v.push_back(values_.at(p));
  return ExponentField(name_, std::move(v), true);
}

Bounds restricted_bounds(const ExponentField& f, const PointSet& points) {
  require(!points.empty(), "restricted bounds need a nonempty point set");
  Bounds b{kInfinity, 0.0};
  for (std::size_t p : points) {
    require(p < f.size(), "point index " + std::to_string(p) + " out of range");
    b.inf = std::min(b.inf, f[p]);
    b.sup = std::max(b.sup, f[p]);
  }
  return b;
}

std::size_t dominance_witness(const ExponentField& f, const ExponentField& g) {
  same_length(f, g);
  std::size_t at = 0;
  double best = kInfinity;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double diff = (f[i] == kInfinity && g[i] == kInfinity) ? 0.0 : f[i] - g[i];
    if (diff < best) {
      best = diff;
      at = i;
    }
  }
  return at;
}

bool strictly_dominates(const ExponentField& f, const ExponentField& g) {
  same_length(f, g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == kInfinity && g[i] == kInfinity) return false;
    if (!(f[i] - g[i] > 0.0)) return false;
  }
  return true;
}

double log_holder_constant(const ExponentField& f, const MetricMeasureSpace& space) {
  require(f.size() == space.size(), "exponent '" + f.name() + "' does not match the space size");
  finite_only(f);
  double c = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const double diff = std::fabs(f[i] - f[j]);
      if (diff == 0.0) continue;
      c = std::max(c, diff * std::log(M_E + 1.0 / space.distance(i, j)));
    }
  return c;
}

ExponentField reciprocal(const ExponentField& f) {
  finite_only(f);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = 1.0 / f[i];
  return ExponentField("1/" + f.name(), std::move(v));
}

double log_holder_constant_reciprocal(const ExponentField& f, const MetricMeasureSpace& space) {
  return log_holder_constant(reciprocal(f), space);
}

double loglemma_constant(double radius, double t_minus_on_ball, double c_log_reciprocal) {
  return std::max({1.0, std::pow(2.0 * radius, 2.0 / t_minus_on_ball), std::exp(c_log_reciprocal)});
}

LoglemmaReport loglemma_bounds(const ExponentField& t, const MetricMeasureSpace& space, const Ball& b, double big_r) {
  require(t.size() == space.size(), "exponent does not match the space size");
  require(!b.members.empty(), "loglemma needs a nonempty ball");
  require(b.radius > 0.0 && big_r > 0.0, "loglemma needs positive radii");
  LoglemmaReport rep;
  const MetricMeasureSpace sub = space.restrict_to(b.members);
  const ExponentField tb = t.restrict_to(b.members);
  rep.c_log_reciprocal = sub.size() >= 2 ? log_holder_constant_reciprocal(tb, sub) : 0.0;
  const double c = rep.c_log_reciprocal;
  const double tm = tb.inf();
  const double tp = tb.sup();
  rep.hypothesis_radius = big_r >= 2.0 * b.radius;
  rep.m_constant = loglemma_constant(b.radius, tm, c);

  rep.margin_i = kInfinity;
  const double inv_r = 1.0 / big_r;
  for (std::size_t a = 0; a < tb.size(); ++a) {
    const double mid = std::pow(inv_r, 1.0 / tb[a]);
    const double low = std::exp(-c) * std::pow(inv_r, 1.0 / tm);
    const double high = std::exp(c) * std::pow(inv_r, 1.0 / tp);
    rep.margin_i = std::min({rep.margin_i, mid / low, high / mid});
  }
  const double lhs_ii = std::pow(b.radius, 1.0 / tp - 1.0 / tm);
  const double rhs_ii = std::exp(c) * std::pow(2.0, 1.0 / tm - 1.0 / tp);
  rep.margin_ii = rhs_ii / lhs_ii;

  rep.margin_iii = kInfinity;
  for (std::size_t a = 0; a < sub.size(); ++a)
    for (std::size_t q = 0; q < sub.size(); ++q) {
      if (a == q) continue;
      const double d = sub.distance(a, q);
      const double ratio = std::pow(d, 1.0 / tb[a]) / std::pow(d, 1.0 / tb[q]);
      rep.margin_iii = std::min(rep.margin_iii, rep.m_constant / std::max(ratio, 1.0 / ratio));
    }
  const double ok = 1.0 - 1e-12;
  rep.pass = rep.margin_i >= ok && rep.margin_ii >= ok && rep.margin_iii >= ok;
  return rep;
}

ExponentField product(const ExponentField& a, const ExponentField& b, std::string name) {
  same_length(a, b);
  finite_only(a);
  finite_only(b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] * b[i];
  return ExponentField(std::move(name), std::move(v));
}

ExponentField sobolev_conjugate(const ExponentField& q_dim, const ExponentField& s, const ExponentField& p) {
  same_length(q_dim, s);
  same_length(q_dim, p);
  finite_only(q_dim);
  finite_only(s);
  finite_only(p);
  std::vector<double> v(q_dim.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double gap = q_dim[i] - s[i] * p[i];
    require(gap > 0.0, "Sobolev conjugate needs sp < Q, violated at point " + std::to_string(i) + " (Q - sp = " +
                           num(gap) + ")",
            ErrorCode::domain);
    v[i] = q_dim[i] * p[i] / gap;
  }
  return ExponentField("gamma", std::move(v));
}

ExponentField holder_exponent(const ExponentField& q_dim, const ExponentField& s, const ExponentField& p) {
  same_length(q_dim, s);
  same_length(q_dim, p);
  finite_only(q_dim);
  finite_only(s);
  finite_only(p);
  std::vector<double> v(q_dim.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = s[i] - q_dim[i] / p[i];
    require(v[i] > 0.0, "Hoelder exponent needs sp > Q, violated at point " + std::to_string(i) + " (alpha = " +
                            num(v[i]) + ")",
            ErrorCode::domain);
  }
  return ExponentField("alpha", std::move(v));
}

ExponentField conjugate(const ExponentField& p) {
  finite_only(p);
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] > 1.0, "conjugate exponent needs p > 1, violated at point " + std::to_string(i), ErrorCode::domain);
    v[i] = p[i] / (p[i] - 1.0);
  }
  return ExponentField(p.name() + "'", std::move(v));
}

ExponentField expand_formula(const std::string& name, const FormulaSpec& spec, const MetricMeasureSpace& space,
                             bool allow_infinity) {
  const std::size_t n = space.size();
  std::vector<double> v(n);
  if (spec.type == "constant") {
    std::fill(v.begin(), v.end(), spec.value);
  } else if (spec.type == "affine") {
    require(space.euclidean(), "affine exponent formula needs a space with coordinates");
    require(spec.axis < space.coords()[0].size(), "affine exponent axis out of range");
    for (std::size_t i = 0; i < n; ++i) v[i] = spec.offset + spec.slope * space.coords()[i][spec.axis];
  } else if (spec.type == "two_zone") {
    std::fill(v.begin(), v.end(), spec.outside);
    for (std::size_t i : spec.zone) {
      require(i < n, "two_zone exponent zone index " + std::to_string(i) + " out of range");
      v[i] = spec.inside;
    }
  } else {
    fail(ErrorCode::parse, "unknown exponent formula type '" + spec.type + "'");
  }
  return ExponentField(name, std::move(v), allow_infinity);
}

}  // namespace varsob
