#pragma once

#include <optional>
#include <vector>

#include "varsob/exponents.hpp"
#include "varsob/metric_space.hpp"

namespace varsob {

struct RegularityWitness {
  std::size_t center = 0;
  double radius = 0.0;
  double ratio = 0.0;  // mu(B(center, radius)) / radius^{Q(center)}
};

struct RegularityProfile {
  std::vector<double> q_dim;  // may vanish at points (Q = p(s - alpha) where s = alpha)
  double b_lower = 0.0;
  std::optional<double> b_upper;
  double r_min = 0.0;
  double r_max = 0.0;
  std::vector<RegularityWitness> witnesses;  // every (x, r) attaining b_lower, capped
};

// Exact minimum of mu(B(x,r)) / r^{Q(x)} over all centers and radii in [r_min, r_max]. The ratio is evaluated
// at every critical radius in range and at both endpoints; between consecutive distances the ball is constant,
// so this is the minimum over the whole interval. r_min <= 0 selects the smallest positive distance.
RegularityProfile best_lower_constant(const MetricMeasureSpace& space, const ExponentField& q_dim, double r_min = 0.0,
                                      double r_max = 1.0);
RegularityProfile best_lower_constant(const MetricMeasureSpace& space, const std::vector<double>& q_dim,
                                      double r_min = 0.0, double r_max = 1.0);

struct DimensionEstimate {
  std::vector<double> slope;
  std::vector<double> r_squared;
  std::vector<std::size_t> samples;  // radii used per point
};

// Per-point least-squares slope of log mu(B(x,r)) against log r over the critical radii in [r_min, r_max].
DimensionEstimate estimate_dimension(const MetricMeasureSpace& space, double r_min, double r_max);

// b (delta / delta_prime)^{Q^+}: a lower constant valid up to delta stays valid up to delta_prime >= delta.
double rescale_threshold(double b, double delta, double delta_prime, const ExponentField& q_dim);

}  // namespace varsob
