#pragma once

#include <cstdint>
#include <vector>

#include "varsob/metric_space.hpp"
#include "varsob/varnorms.hpp"

namespace varsob {

// n points i*h, i = 0..n-1, each of mass h.
MetricMeasureSpace grid1d(std::size_t n, double h);
// nx * ny points (i h, j h) with mass h^2; index = j * nx + i.
MetricMeasureSpace grid2d(std::size_t nx, std::size_t ny, double h);

struct AtomGrid {
  MetricMeasureSpace space;
  std::size_t origin = 0;
};
// Lattice h Z^n inside the open unit ball, cell masses h^n, plus an extra mass `atom` at the origin.
AtomGrid ball_grid_with_atom(int n_dim, double h, double atom = 1.0);

// Left endpoints of the 2^level intervals of the Cantor construction with the given ratio, each of mass 2^-level.
MetricMeasureSpace cantor(int level, double ratio = 1.0 / 3.0);

struct TwoZone {
  MetricMeasureSpace space;
  PointSet left;   // x < 0
  PointSet right;  // x >= 0
};
// Points k/n for k = -n..n on a line; masses h^{dim_left} on the left half and h^{dim_right} on the right, h = 1/n.
TwoZone two_zone_glued(std::size_t n, double dim_left, double dim_right);

// Function families.
FunctionSample coordinate_function(const MetricMeasureSpace& space, std::size_t axis);
FunctionSample power_function(const MetricMeasureSpace& space, std::size_t center, double theta);
// 1 on B(center, r_inner), 0 off B(center, r_outer), linear in the distance between.
FunctionSample annular_cutoff(const MetricMeasureSpace& space, std::size_t center, double r_inner, double r_outer);
// log(radius / max(d, floor)) clipped at 0, floor = half the smallest positive distance.
FunctionSample log_bump(const MetricMeasureSpace& space, std::size_t center, double radius);
FunctionSample random_function(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

// Index of the point closest to the given coordinates (Euclidean spaces only); ties go to the lower index.
std::size_t nearest_point(const MetricMeasureSpace& space, const std::vector<double>& coords);

}  // namespace varsob
