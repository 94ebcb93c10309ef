#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace varsob {

using PointSet = std::vector<std::size_t>;

// Finite metric measure space. Validated once at construction, immutable after.
class MetricMeasureSpace {
 public:
  MetricMeasureSpace() = default;

  // Throws Error with a diagnostic naming the offending entry or triple.
  static MetricMeasureSpace from_matrix(std::vector<std::vector<double>> dist, std::vector<double> weights,
                                        std::vector<std::string> labels = {});
  static MetricMeasureSpace from_coords(std::vector<std::vector<double>> coords, std::vector<double> weights,
                                        std::vector<std::string> labels = {});

  std::size_t size() const { return n_; }
  double distance(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<double>>& coords() const { return coords_; }
  bool euclidean() const { return !coords_.empty(); }

  double total_mass() const { return total_mass_; }
  double diameter() const { return diameter_; }
  // Smallest positive distance; 0 for a single point.
  double min_distance() const { return min_distance_; }

  // Points ordered by distance from i (ties by index), with matching distances.
  const std::vector<std::size_t>& order_from(std::size_t i) const { return order_[i]; }
  const std::vector<double>& sorted_distances_from(std::size_t i) const { return sorted_dist_[i]; }

  // Sorted distinct pairwise distances together with midpoints between consecutive values.
  const std::vector<double>& critical_radii() const { return critical_; }
  // Sorted distinct positive pairwise distances.
  const std::vector<double>& distinct_distances() const { return distinct_; }

  // Sub-space on the given points (sorted, unique). Weights and distances are inherited.
  MetricMeasureSpace restrict_to(const PointSet& points) const;
  double measure(const PointSet& points) const;

 private:
  void finalize();
  void validate() const;

  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<double> weights_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::vector<double>> sorted_dist_;
  std::vector<double> critical_;
  std::vector<double> distinct_;
  double total_mass_ = 0.0;
  double diameter_ = 0.0;
  double min_distance_ = 0.0;
};

struct Ball {
  std::size_t center = 0;
  double radius = 0.0;
  bool closed = false;
  PointSet members;
  double measure = 0.0;
};

Ball ball(const MetricMeasureSpace& space, std::size_t center, double r, bool closed = false);
double ball_measure(const MetricMeasureSpace& space, std::size_t center, double r, bool closed = false);
PointSet ball_members(const MetricMeasureSpace& space, std::size_t center, double r, bool closed = false);

// Greedy maximal r/2-separated subset, scanning indices in increasing order.
PointSet separated_net(const MetricMeasureSpace& space, double r);

struct OverlapReport {
  double r = 0.0;
  double big_r = 0.0;
  std::size_t net_size = 0;
  std::size_t max_multiplicity = 0;
  std::size_t doubling_constant = 0;
  double bound = 0.0;
  bool separated = false;
  bool covering = false;
  bool pass = false;
};

OverlapReport overlap_bound_check(const MetricMeasureSpace& space, double r, double big_r, const PointSet& net);
OverlapReport overlap_bound_check(const MetricMeasureSpace& space, double r, double big_r, const PointSet& net,
                                  std::size_t doubling_constant);

// Number of radius-r/2 balls used by the farthest-point greedy cover of B(x, r).
std::size_t greedy_half_cover(const MetricMeasureSpace& space, std::size_t x, double r);
std::size_t estimate_doubling(const MetricMeasureSpace& space);

// Candidate grid 0.99, 0.98, ..., 0.01.
std::vector<double> perfectness_grid();
bool annulus_nonempty(const MetricMeasureSpace& space, std::size_t x, double r, double lambda);
std::optional<double> uniform_perfectness(const MetricMeasureSpace& space, double epsilon);

double phi(const MetricMeasureSpace& space, std::size_t x, double r);
// phi applied j times; j = 0 returns r.
double phi_iterate(const MetricMeasureSpace& space, std::size_t x, double r, int j);

}  // namespace varsob
