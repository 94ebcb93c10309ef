#include "varsob/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "varsob/constants.hpp"
#include "varsob/error.hpp"

namespace varsob {

namespace {

constexpr std::size_t kMaxWitnesses = 32;

// Masses of open balls around one center, by binary search in the sorted distance list.
struct BallMasses {
  const std::vector<double>* dist = nullptr;
  std::vector<double> prefix;  // prefix[k] = mass of the k nearest points

  BallMasses(const MetricMeasureSpace& space, std::size_t x) : dist(&space.sorted_distances_from(x)) {
    const auto& order = space.order_from(x);
    prefix.assign(order.size() + 1, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) prefix[k + 1] = prefix[k] + space.weight(order[k]);
  }
  double open(double r) const {
    const auto k = static_cast<std::size_t>(std::lower_bound(dist->begin(), dist->end(), r) - dist->begin());
    return prefix[k];
  }
};

std::vector<double> radii_in(const MetricMeasureSpace& space, double r_min, double r_max) {
  std::vector<double> out{r_min};
  for (double r : space.critical_radii())
    if (r > r_min && r < r_max) out.push_back(r);
  if (r_max > r_min) out.push_back(r_max);
  return out;
}

double default_r_min(const MetricMeasureSpace& space, double r_min) {
  if (r_min > 0.0) return r_min;
  require(space.size() >= 2, "a single point has no positive distance; pass r_min explicitly");
  return space.min_distance();
}

}  // namespace

RegularityProfile best_lower_constant(const MetricMeasureSpace& space, const ExponentField& q_dim, double r_min,
                                      double r_max) {
  return best_lower_constant(space, q_dim.values(), r_min, r_max);
}

RegularityProfile best_lower_constant(const MetricMeasureSpace& space, const std::vector<double>& q_dim,
                                      double r_min, double r_max) {
  require(q_dim.size() == space.size(), "dimension field size does not match the space");
  for (double v : q_dim) require(std::isfinite(v) && v >= 0.0, "dimension values must be finite and nonnegative");
  r_min = default_r_min(space, r_min);
  require(r_min <= r_max, "regularity scan needs 0 < r_min <= r_max");
  RegularityProfile prof;
  prof.q_dim = q_dim;
  prof.r_min = r_min;
  prof.r_max = r_max;
  const auto radii = radii_in(space, r_min, r_max);
  double lo = kInfinity, hi = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const BallMasses bm(space, x);
    for (double r : radii) {
      const double ratio = bm.open(r) / std::pow(r, q_dim[x]);
      hi = std::max(hi, ratio);
      if (ratio < lo * (1.0 - 1e-12)) {
        lo = ratio;
        prof.witnesses.clear();
      }
      if (ratio <= lo * (1.0 + 1e-12) && prof.witnesses.size() < kMaxWitnesses)
        prof.witnesses.push_back({x, r, ratio});
    }
  }
  prof.b_lower = lo;
  prof.b_upper = hi;
  return prof;
}

DimensionEstimate estimate_dimension(const MetricMeasureSpace& space, double r_min, double r_max) {
  require(space.size() >= 2, "dimension estimate needs at least two points");
  require(0.0 < r_min && r_min < r_max, "dimension estimate needs 0 < r_min < r_max");
  std::vector<double> radii;
  for (double r : space.critical_radii())
    if (r >= r_min && r <= r_max) radii.push_back(r);
  DimensionEstimate est;
  std::vector<double> slopes(space.size());
  est.r_squared.assign(space.size(), 0.0);
  est.samples.assign(space.size(), 0);
  for (std::size_t x = 0; x < space.size(); ++x) {
    const BallMasses bm(space, x);
    std::vector<double> lx, ly;
    for (double r : radii) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(bm.open(r)));
    }
    require(lx.size() >= 3, "fewer than three critical radii in range at point " + std::to_string(x));
    const double m = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k] / m;
      my += ly[k] / m;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
      syy += (ly[k] - my) * (ly[k] - my);
    }
    slopes[x] = sxy / sxx;
    est.r_squared[x] = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    est.samples[x] = lx.size();
  }
  est.slope = std::move(slopes);
  return est;
}

double rescale_threshold(double b, double delta, double delta_prime, const ExponentField& q_dim) {
  return constants::rescale_threshold(b, delta, delta_prime, q_dim.sup());
}

}  // namespace varsob
