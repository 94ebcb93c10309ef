#include "varsob/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "varsob/error.hpp"

namespace varsob {

MetricMeasureSpace grid1d(std::size_t n, double h) {
  require(n >= 1 && h > 0.0, "grid1d needs n >= 1 and h > 0");
  std::vector<std::vector<double>> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = {static_cast<double>(i) * h};
  return MetricMeasureSpace::from_coords(std::move(coords), std::vector<double>(n, h));
}

MetricMeasureSpace grid2d(std::size_t nx, std::size_t ny, double h) {
  require(nx >= 1 && ny >= 1 && h > 0.0, "grid2d needs nx, ny >= 1 and h > 0");
  std::vector<std::vector<double>> coords;
  coords.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) coords.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
  return MetricMeasureSpace::from_coords(std::move(coords), std::vector<double>(nx * ny, h * h));
}

AtomGrid ball_grid_with_atom(int n_dim, double h, double atom) {
  require(n_dim >= 1 && n_dim <= 3, "ball_grid_with_atom supports dimensions 1 to 3");
  require(h > 0.0 && h < 1.0, "ball_grid_with_atom needs 0 < h < 1");
  require(atom >= 0.0, "atom mass must be nonnegative");
  const int m = static_cast<int>(std::ceil(1.0 / h));
  std::vector<std::vector<double>> coords;
  std::vector<int> idx(static_cast<std::size_t>(n_dim), -m);
  AtomGrid out;
  std::size_t origin = 0;
  bool found = false;
  // Odometer over the cube [-m, m]^n.
  while (true) {
    double r2 = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n_dim));
    bool zero = true;
    for (int d = 0; d < n_dim; ++d) {
      x[static_cast<std::size_t>(d)] = idx[static_cast<std::size_t>(d)] * h;
      r2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
      zero = zero && idx[static_cast<std::size_t>(d)] == 0;
    }
    if (r2 < 1.0 - 1e-12) {
      if (zero) {
        origin = coords.size();
        found = true;
      }
      coords.push_back(std::move(x));
    }
    int d = 0;
    while (d < n_dim && ++idx[static_cast<std::size_t>(d)] > m) idx[static_cast<std::size_t>(d++)] = -m;
    if (d == n_dim) break;
  }
  require(found, "origin missing from the ball grid");
  std::vector<double> w(coords.size(), std::pow(h, n_dim));
  w[origin] += atom;
  out.space = MetricMeasureSpace::from_coords(std::move(coords), std::move(w));
  out.origin = origin;
  return out;
}

MetricMeasureSpace cantor(int level, double ratio) {
  require(level >= 0 && level <= 16, "cantor level must lie in [0, 16]");
  require(ratio > 0.0 && ratio < 0.5, "cantor ratio must lie in (0, 1/2)");
  const std::size_t n = std::size_t{1} << level;
  std::vector<std::vector<double>> coords(n);
  for (std::size_t code = 0; code < n; ++code) {
    double x = 0.0, scale = 1.0;
    for (int d = level - 1; d >= 0; --d) {
      // Digit 1 jumps to the right interval, which starts 1 - ratio further along at this scale.
      if ((code >> d) & 1U) x += scale * (1.0 - ratio);
      scale *= ratio;
    }
    coords[code] = {x};
  }
  return MetricMeasureSpace::from_coords(std::move(coords), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

TwoZone two_zone_glued(std::size_t n, double dim_left, double dim_right) {
  require(n >= 1, "two_zone_glued needs n >= 1");
  require(dim_left > 0.0 && dim_right > 0.0, "zone dimensions must be positive");
  const double h = 1.0 / static_cast<double>(n);
  TwoZone out;
  std::vector<std::vector<double>> coords;
  std::vector<double> w;
  const auto ni = static_cast<long>(n);
  for (long k = -ni; k <= ni; ++k) {
    coords.push_back({static_cast<double>(k) * h});
    if (k < 0) {
      w.push_back(std::pow(h, dim_left));
      out.left.push_back(coords.size() - 1);
    } else {
      w.push_back(std::pow(h, dim_right));
      out.right.push_back(coords.size() - 1);
    }
  }
  out.space = MetricMeasureSpace::from_coords(std::move(coords), std::move(w));
  return out;
}

FunctionSample coordinate_function(const MetricMeasureSpace& space, std::size_t axis) {
  require(space.euclidean(), "coordinate functions need a Euclidean space");
  FunctionSample u(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    require(axis < space.coords()[i].size(), "coordinate axis out of range");
    u[i] = space.coords()[i][axis];
  }
  return u;
}

FunctionSample power_function(const MetricMeasureSpace& space, std::size_t center, double theta) {
  require(center < space.size(), "center out of range");
  require(theta > 0.0, "power function needs theta > 0");
  FunctionSample u(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) u[i] = std::pow(space.distance(center, i), theta);
  return u;
}

FunctionSample annular_cutoff(const MetricMeasureSpace& space, std::size_t center, double r_inner, double r_outer) {
  require(center < space.size(), "center out of range");
  require(0.0 < r_inner && r_inner < r_outer, "annular cutoff needs 0 < r_inner < r_outer");
  FunctionSample u(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double d = space.distance(center, i);
    u[i] = std::clamp((r_outer - d) / (r_outer - r_inner), 0.0, 1.0);
  }
  return u;
}

FunctionSample log_bump(const MetricMeasureSpace& space, std::size_t center, double radius) {
  require(center < space.size(), "center out of range");
  require(radius > 0.0, "log bump needs a positive radius");
  const double floor = space.size() > 1 ? 0.5 * space.min_distance() : radius;
  FunctionSample u(space.size());
  for (std::size_t i = 0; i < space.size(); ++i)
    u[i] = std::max(0.0, std::log(radius / std::max(space.distance(center, i), floor)));
  return u;
}

FunctionSample random_function(std::size_t n, std::uint64_t seed, double lo, double hi) {
  require(lo <= hi, "random function needs lo <= hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  FunctionSample u(n);
  for (auto& v : u) v = dist(rng);
  return u;
}

std::size_t nearest_point(const MetricMeasureSpace& space, const std::vector<double>& coords) {
  require(space.euclidean(), "nearest_point needs a Euclidean space");
  std::size_t best = 0;
  double best_d = kInfinity;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& c = space.coords()[i];
    require(c.size() == coords.size(), "coordinate dimension mismatch");
    double d = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) d += (c[k] - coords[k]) * (c[k] - coords[k]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace varsob
