#pragma once

#include <optional>
#include <vector>

#include "varsob/exponents.hpp"
#include "varsob/metric_space.hpp"
#include "varsob/report.hpp"
#include "varsob/varnorms.hpp"

namespace varsob {

struct LevelRange {
  int k_min = 0;
  int k_max = 0;
};

// Dyadic level of a positive distance: the k with 2^{-k-1} <= d < 2^{-k}.
int pair_level(double d);
LevelRange active_levels(const MetricMeasureSpace& space);

// l^q(L^p) is the Besov scale, L^p(l^q) the Triebel-Lizorkin scale.
enum class GradientScale { lq_lp, lp_lq };
const char* to_string(GradientScale s);

// Coefficient in front of g_k: d(x,y)^{s(x)} (default) or 2^{-k s(x)} (the alternative convention).
enum class Coefficient { distance, dyadic };

struct GradientOptions {
  double tol = 1e-9;        // relative accuracy of the outer norm search
  double rel_gap = 1e-8;    // duality gap target of each convex solve
  Coefficient coefficient = Coefficient::distance;
};

struct GradientSolution {
  bool vector = false;
  FunctionSample g;        // scalar gradient
  SequenceSample levels;   // vector gradient over the active levels
  NormValue objective;     // norm of the returned (feasible) gradient
  double lower_bound = 0;  // certified lower bound on the minimum (0 when unavailable)
  double certificate = 0;  // max constraint violation, absolute
  bool heuristic = false;  // nonconvex instance: local solution only
  bool converged = false;
  int solves = 0;
  int iterations = 0;
};

GradientSolution minimal_scalar_gradient(const MetricMeasureSpace& space, const FunctionSample& u,
                                         const ExponentField& s, const ExponentField& p,
                                         const GradientOptions& opts = {});
GradientSolution minimal_vector_gradient(const MetricMeasureSpace& space, const FunctionSample& u,
                                         const ExponentField& s, const ExponentField& p, const ExponentField& q,
                                         GradientScale scale, const GradientOptions& opts = {});

// Max violation of |u(x)-u(y)| <= d^{s(x)} g(x) + d^{s(y)} g(y) over all pairs.
double scalar_violation(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                        const FunctionSample& g);
// Same for a vector gradient; each pair is tested at its own level. Levels outside the sample count as zero.
double vector_violation(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                        const SequenceSample& g, Coefficient coefficient = Coefficient::distance);

// Norm of a vector gradient in the given scale.
NormValue vector_norm(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                      const ExponentField& q, GradientScale scale, double tol = kDefaultTol);

VerificationReport norm_convention_equivalence(const MetricMeasureSpace& space, const FunctionSample& u,
                                               const ExponentField& s, const ExponentField& p,
                                               const ExponentField& q, GradientScale scale,
                                               const GradientOptions& opts = {});

// Constant with max|u(x)-u(y)| <= C ||g||_{L^p} for every scalar gradient g.
double gradient_zero_constant(const MetricMeasureSpace& space, const ExponentField& s, const ExponentField& p);
VerificationReport gradient_zero_implies_constant(const MetricMeasureSpace& space, const FunctionSample& u,
                                                  const ExponentField& s, const ExponentField& p, double tol,
                                                  const GradientOptions& opts = {});

struct CutoffGradient {
  int k_l = 0;
  SequenceSample levels;   // g_k over the active levels of the space (all that the constraints see)
  double certificate = 0;  // max violation of the vector-gradient constraints for u
  double lipschitz_measured = 0;
  double tl_norm = 0;      // ||{g_k}||_{L^p(l^q)} over all k in Z
  double besov_norm = 0;   // ||{g_k}||_{l^q(L^p)} over all k in Z
  double tl_bound = 0;     // constant * max{L^{s_B^-}, L^{s_B^+}} ||chi_B||_p
  double besov_bound = 0;
  double a1 = 0, a2 = 0, a2_printed = 0;
};

// Value of g_k at x for the cut-off construction (before the indicator of B).
double cutoff_level_value(double lipschitz, int k_l, int k, double s_x);
int cutoff_threshold_level(double lipschitz);
// Norm over all k in Z of the cut-off gradient supported on B, in either scale.
double cutoff_norm(const MetricMeasureSpace& space, const PointSet& b, double lipschitz, const ExponentField& s,
                   const ExponentField& p, const ExponentField& q, GradientScale scale, double tol = kDefaultTol);

// Builds the explicit gradient of an L-Lipschitz [0,1]-valued u supported in B and checks both norm bounds.
CutoffGradient lipschitz_cutoff_gradient(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& b,
                                         double lipschitz, const ExponentField& s, const ExponentField& p,
                                         const ExponentField& q, double tol = kDefaultTol);
VerificationReport lipschitz_cutoff_check(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& b,
                                          double lipschitz, const ExponentField& s, const ExponentField& p,
                                          const ExponentField& q, double tol = kDefaultTol);

VerificationReport iterative_lemma_check(const std::vector<double>& a, double p, double q, double rho, double tau);

}  // namespace varsob
