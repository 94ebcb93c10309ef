#pragma once

#include <functional>
#include <vector>

#include "varsob/exponents.hpp"
#include "varsob/metric_space.hpp"
#include "varsob/report.hpp"

namespace varsob {

using FunctionSample = std::vector<double>;

enum class NormKind { modular, luxemburg, mixed_lqp, mixed_plq, holder_seminorm, sup_norm };

const char* to_string(NormKind k);

struct NormValue {
  double value = 0.0;
  double tolerance = 0.0;  // width of the final bracket
  NormKind kind = NormKind::luxemburg;
};

// Dyadic family {g_k}, k = k_min .. k_min + levels.size() - 1; zero outside that range.
struct SequenceSample {
  int k_min = 0;
  std::vector<FunctionSample> levels;

  int k_max() const { return k_min + static_cast<int>(levels.size()) - 1; }
  bool empty() const { return levels.empty(); }
};

inline constexpr double kDefaultTol = 1e-10;

// Smallest lambda > 0 with f(lambda) <= 1 for a nonincreasing f, bracketed to relative width tol.
// Returns the upper end of the final bracket (always feasible). f must tend to 0 at infinity.
NormValue monotone_root(const std::function<double(double)>& f, double hint, double tol);

double modular(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p);
double modular(const std::vector<double>& weights, const FunctionSample& u, const std::vector<double>& p);
NormValue luxemburg(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p,
                    double tol = kDefaultTol);
NormValue luxemburg(const std::vector<double>& weights, const FunctionSample& u, const std::vector<double>& p,
                    double tol = kDefaultTol);
// Norm of the indicator of the whole space.
double unit_norm(const MetricMeasureSpace& space, const ExponentField& p, double tol = kDefaultTol);

VerificationReport rel_sandwich_check(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& p,
                                      double tol = kDefaultTol);
VerificationReport holder_inequality_check(const MetricMeasureSpace& space, const FunctionSample& f,
                                           const FunctionSample& g, const ExponentField& p,
                                           double tol = kDefaultTol);
double lebesgue_embedding_constant(const ExponentField& p, const ExponentField& q, const MetricMeasureSpace& space,
                                   double tol = kDefaultTol);

// l^q(L^p) semimodular by its definition: per-level infima found by bisection.
double mixed_modular_lq_lp(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol = 1e-13);
// Same quantity through the closed form sum_k || |g_k|^q ||_{L^{p/q}}; needs q^+ < infinity.
double mixed_modular_lq_lp_closed(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                  const ExponentField& q, double tol = 1e-13);
NormValue mixed_norm_lq_lp(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol = kDefaultTol);
NormValue mixed_norm_lq_lp_closed(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                  const ExponentField& q, double tol = kDefaultTol);
// l^q of the per-level L^p norms; q must be constant (possibly infinite).
NormValue mixed_norm_lq_lp_constant_q(const MetricMeasureSpace& space, const SequenceSample& g,
                                      const ExponentField& p, double q, double tol = kDefaultTol);

// Pointwise l^{q(x)} norm of the levels (sup where q(x) is infinite).
FunctionSample pointwise_lq(const SequenceSample& g, const ExponentField& q);
NormValue mixed_norm_lp_lq(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q, double tol = kDefaultTol);
// L^p(l^q) modular, sum_x w(x) ||g(x)||_{l^{q(x)}}^{p(x)}.
double mixed_modular_lp_lq(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                           const ExponentField& q);

VerificationReport monotonicity_check(const MetricMeasureSpace& space, const SequenceSample& g, const ExponentField& p,
                                      const ExponentField& q1, const ExponentField& q2, double tol = kDefaultTol);

double holder_seminorm(const FunctionSample& u, const ExponentField& alpha, const MetricMeasureSpace& space);
double sup_norm(const FunctionSample& u);

double median(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& points);
VerificationReport median_bound_check(const MetricMeasureSpace& space, const FunctionSample& u, const PointSet& points,
                                      const ExponentField& p, double c, double tol = 1e-14);
double median_factor(double measure, double p_minus);

// Restriction helpers.
FunctionSample restrict_values(const FunctionSample& u, const PointSet& points);
PointSet all_points(const MetricMeasureSpace& space);

}  // namespace varsob
