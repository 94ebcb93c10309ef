#include "varsob/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "varsob/error.hpp"

namespace varsob {

namespace {

constexpr std::size_t kExhaustiveTriangleLimit = 200;
constexpr std::size_t kSampledTriples = 100000;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool close_rel(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

MetricMeasureSpace MetricMeasureSpace::from_matrix(std::vector<std::vector<double>> dist, std::vector<double> weights,
                                                   std::vector<std::string> labels) {
  const std::size_t n = dist.size();
  require(n > 0, "space must contain at least one point");
  require(weights.size() == n, "weights length " + std::to_string(weights.size()) + " does not match " +
                                   std::to_string(n) + " points");
  require(labels.empty() || labels.size() == n, "labels length does not match point count");
  MetricMeasureSpace s;
  s.n_ = n;
  s.dist_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    require(dist[i].size() == n, "distance row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < n; ++j) s.dist_[i * n + j] = dist[i][j];
  }
  s.weights_ = std::move(weights);
  s.labels_ = std::move(labels);
  s.validate();
  s.finalize();
  return s;
}

MetricMeasureSpace MetricMeasureSpace::from_coords(std::vector<std::vector<double>> coords, std::vector<double> weights,
                                                   std::vector<std::string> labels) {
  const std::size_t n = coords.size();
  require(n > 0, "space must contain at least one point");
  const std::size_t dim = coords[0].size();
  require(dim > 0, "coordinates must have positive dimension");
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    require(coords[i].size() == dim, "coordinate " + std::to_string(i) + " has wrong dimension");
    for (std::size_t j = 0; j < i; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        const double t = coords[i][a] - coords[j][a];
        acc += t * t;
      }
      dist[i][j] = dist[j][i] = std::sqrt(acc);
    }
  }
  MetricMeasureSpace s = from_matrix(std::move(dist), std::move(weights), std::move(labels));
  s.coords_ = std::move(coords);
  return s;
}

void MetricMeasureSpace::validate() const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights_[i];
    require(std::isfinite(w) && w > 0.0, "weight[" + std::to_string(i) + "] = " + fmt_double(w) + " is not > 0");
    require(distance(i, i) == 0.0, "dist[" + std::to_string(i) + "][" + std::to_string(i) + "] is not 0");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distance(i, j);
      require(std::isfinite(d) && d > 0.0, "dist[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                               fmt_double(d) + " is not > 0");
      require(d == distance(j, i), "dist is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double lhs = distance(i, k);
    const double rhs = distance(i, j) + distance(j, k);
    if (lhs > rhs * (1.0 + 1e-12)) {
      fail(ErrorCode::invalid_argument, "triangle inequality violated for triple (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ", " + std::to_string(k) + "): d(" +
                                            std::to_string(i) + "," + std::to_string(k) + ") = " + fmt_double(lhs) +
                                            " > " + fmt_double(rhs));
    }
  };
  if (n <= kExhaustiveTriangleLimit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = i + 1; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < kSampledTriples; ++t) check(pick(rng), pick(rng), pick(rng));
  }
}

void MetricMeasureSpace::finalize() {
  const std::size_t n = n_;
  total_mass_ = 0.0;
  for (double w : weights_) total_mass_ += w;
  order_.assign(n, {});
  sorted_dist_.assign(n, {});
  std::vector<double> all;
  all.reserve(n * (n - 1) / 2);
  diameter_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& ord = order_[i];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return distance(i, a) < distance(i, b); });
    auto& sd = sorted_dist_[i];
    sd.resize(n);
    for (std::size_t k = 0; k < n; ++k) sd[k] = distance(i, ord[k]);
    for (std::size_t j = i + 1; j < n; ++j) all.push_back(distance(i, j));
    diameter_ = std::max(diameter_, sd.back());
  }
  std::sort(all.begin(), all.end());
  distinct_.clear();
  for (double d : all) {
    if (distinct_.empty() || !close_rel(distinct_.back(), d)) distinct_.push_back(d);
  }
  min_distance_ = distinct_.empty() ? 0.0 : distinct_.front();
  critical_.clear();
  for (std::size_t k = 0; k < distinct_.size(); ++k) {
    if (k > 0) critical_.push_back(0.5 * (distinct_[k - 1] + distinct_[k]));
    critical_.push_back(distinct_[k]);
  }
}

MetricMeasureSpace MetricMeasureSpace::restrict_to(const PointSet& points) const {
  require(!points.empty(), "cannot restrict to an empty point set");
  for (std::size_t k = 0; k < points.size(); ++k) {
    require(points[k] < n_, "point index " + std::to_string(points[k]) + " out of range");
    require(k == 0 || points[k - 1] < points[k], "restriction points must be sorted and unique");
  }
  MetricMeasureSpace s;
  const std::size_t m = points.size();
  s.n_ = m;
  s.dist_.resize(m * m);
  s.weights_.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    s.weights_[a] = weights_[points[a]];
    for (std::size_t b = 0; b < m; ++b) s.dist_[a * m + b] = distance(points[a], points[b]);
  }
  if (!labels_.empty()) {
    for (std::size_t p : points) s.labels_.push_back(labels_[p]);
  }
  if (!coords_.empty()) {
    for (std::size_t p : points) s.coords_.push_back(coords_[p]);
  }
  s.finalize();
  return s;
}

double MetricMeasureSpace::measure(const PointSet& points) const {
  double m = 0.0;
  for (std::size_t p : points) m += weights_.at(p);
  return m;
}

namespace {

std::size_t ball_count(const MetricMeasureSpace& space, std::size_t center, double r, bool closed) {
  const auto& sd = space.sorted_distances_from(center);
  auto it = closed ? std::upper_bound(sd.begin(), sd.end(), r) : std::lower_bound(sd.begin(), sd.end(), r);
  return static_cast<std::size_t>(it - sd.begin());
}

void check_center(const MetricMeasureSpace& space, std::size_t center) {
  require(center < space.size(), "center " + std::to_string(center) + " out of range (n = " +
                                     std::to_string(space.size()) + ")");
}

}  // namespace

PointSet ball_members(const MetricMeasureSpace& space, std::size_t center, double r, bool closed) {
  check_center(space, center);
  require(r >= 0.0, "ball radius must be nonnegative");
  const std::size_t cnt = ball_count(space, center, r, closed);
  const auto& ord = space.order_from(center);
  PointSet out(ord.begin(), ord.begin() + static_cast<std::ptrdiff_t>(cnt));
  std::sort(out.begin(), out.end());
  return out;
}

double ball_measure(const MetricMeasureSpace& space, std::size_t center, double r, bool closed) {
  check_center(space, center);
  require(r >= 0.0, "ball radius must be nonnegative");
  const std::size_t cnt = ball_count(space, center, r, closed);
  const auto& ord = space.order_from(center);
  double m = 0.0;
  for (std::size_t k = 0; k < cnt; ++k) m += space.weight(ord[k]);
  return m;
}

Ball ball(const MetricMeasureSpace& space, std::size_t center, double r, bool closed) {
  Ball b;
  b.center = center;
  b.radius = r;
  b.closed = closed;
  b.members = ball_members(space, center, r, closed);
  b.measure = space.measure(b.members);
  return b;
}

PointSet separated_net(const MetricMeasureSpace& space, double r) {
  require(r > 0.0, "net scale must be positive");
  PointSet net;
  const double half = 0.5 * r;
  for (std::size_t i = 0; i < space.size(); ++i) {
    bool far = true;
    for (std::size_t s : net) {
      if (space.distance(i, s) < half) {
        far = false;
        break;
      }
    }
    if (far) net.push_back(i);
  }
  return net;
}

std::size_t greedy_half_cover(const MetricMeasureSpace& space, std::size_t x, double r) {
  const PointSet members = ball_members(space, x, r);
  if (members.empty()) return 0;
  const double half = 0.5 * r;
  std::vector<double> gap(members.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;  // lowest index member seeds the cover
  std::size_t count = 0;
  while (true) {
    ++count;
    const std::size_t c = members[next];
    double worst = -1.0;
    std::size_t worst_at = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      gap[a] = std::min(gap[a], space.distance(c, members[a]));
      if (gap[a] > worst) {
        worst = gap[a];
        worst_at = a;
      }
    }
    if (worst < half) break;
    next = worst_at;
  }
  return count;
}

std::size_t estimate_doubling(const MetricMeasureSpace& space) {
  std::vector<double> radii = space.critical_radii();
  for (double d : space.distinct_distances()) radii.push_back(2.0 * d);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::size_t m = 1;
  for (std::size_t x = 0; x < space.size(); ++x)
    for (double r : radii) m = std::max(m, greedy_half_cover(space, x, r));
  return m;
}

OverlapReport overlap_bound_check(const MetricMeasureSpace& space, double r, double big_r, const PointSet& net,
                                  std::size_t doubling_constant) {
  require(big_r > r && r > 0.0, "overlap check needs R > r > 0");
  OverlapReport rep;
  rep.r = r;
  rep.big_r = big_r;
  rep.net_size = net.size();
  rep.doubling_constant = doubling_constant;
  rep.separated = true;
  for (std::size_t a = 0; a < net.size(); ++a)
    for (std::size_t b = a + 1; b < net.size(); ++b)
      if (space.distance(net[a], net[b]) < 0.5 * r) rep.separated = false;
  rep.covering = true;
  for (std::size_t x = 0; x < space.size(); ++x) {
    std::size_t mult = 0;
    bool covered = false;
    for (std::size_t s : net) {
      const double d = space.distance(x, s);
      if (d < big_r) ++mult;
      if (d < r) covered = true;
    }
    rep.covering = rep.covering && covered;
    rep.max_multiplicity = std::max(rep.max_multiplicity, mult);
  }
  const double m = static_cast<double>(doubling_constant);
  rep.bound = m * m * m * std::pow(big_r / r, std::log2(m));
  rep.pass = rep.separated && rep.covering && static_cast<double>(rep.max_multiplicity) <= rep.bound;
  return rep;
}

OverlapReport overlap_bound_check(const MetricMeasureSpace& space, double r, double big_r, const PointSet& net) {
  return overlap_bound_check(space, r, big_r, net, estimate_doubling(space));
}

std::vector<double> perfectness_grid() {
  std::vector<double> g;
  for (int k = 99; k >= 1; --k) g.push_back(k / 100.0);
  return g;
}

bool annulus_nonempty(const MetricMeasureSpace& space, std::size_t x, double r, double lambda) {
  check_center(space, x);
  for (double d : space.sorted_distances_from(x)) {
    if (d >= r) break;
    if (d >= lambda * r) return true;
  }
  return false;
}

std::optional<double> uniform_perfectness(const MetricMeasureSpace& space, double epsilon) {
  require(epsilon > 0.0, "perfectness resolution epsilon must be positive");
  // For each constrained (x, r) the annulus is nonempty iff lambda <= (largest distance below r) / r.
  double worst = 1.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto& sd = space.sorted_distances_from(x);
    for (double r : space.critical_radii()) {
      if (r < epsilon) continue;
      if (sd.back() < r) continue;  // X minus B(x, r) is empty
      auto it = std::lower_bound(sd.begin(), sd.end(), r);
      const double below = *(it - 1);
      worst = std::min(worst, below / r);
    }
  }
  for (double lam : perfectness_grid()) {
    if (lam <= worst) return lam;
  }
  return std::nullopt;
}

double phi(const MetricMeasureSpace& space, std::size_t x, double r) {
  check_center(space, x);
  require(r >= 0.0, "phi needs r >= 0");
  const double half = 0.5 * ball_measure(space, x, r);
  const auto& sd = space.sorted_distances_from(x);
  const auto& ord = space.order_from(x);
  const std::size_t n = sd.size();
  double cum = 0.0;
  double best = 0.0;
  std::size_t k = 0;
  while (k < n && sd[k] < r) {
    const double level = sd[k];
    while (k < n && sd[k] == level) cum += space.weight(ord[k++]);
    if (cum > half) break;
    // mu(B(x, s)) = cum for s in (level, next distance]
    best = (k < n) ? std::min(sd[k], r) : r;
  }
  return best;
}

double phi_iterate(const MetricMeasureSpace& space, std::size_t x, double r, int j) {
  require(j >= 0, "iterate count must be nonnegative");
  double v = r;
  for (int t = 0; t < j; ++t) v = phi(space, x, v);
  return v;
}

}  // namespace varsob
