#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varsob/exponents.hpp"
#include "varsob/hajlasz.hpp"
#include "varsob/metric_space.hpp"
#include "varsob/regularity.hpp"
#include "varsob/report.hpp"
#include "varsob/varnorms.hpp"

namespace varsob {

// Which gradient norm stands on the right-hand side: scalar M^{s,p}, L^p(l^q) or l^q(L^p) vector gradients.
enum class GradientMode { scalar, tl, besov };
const char* to_string(GradientMode m);

struct HarnessOptions {
  double sigma = 2.0;
  double delta = 1.0;  // radius up to which lower regularity is assumed
  GradientMode mode = GradientMode::scalar;
  std::optional<ExponentField> q;  // required for tl / besov
  std::optional<double> constant;  // supplied C_S, C_H or C_MT1; empirical when absent
  double mt_bound = 2.0;           // C_MT2
  std::optional<double> b;         // assumed lower regularity constant; b_emp > 0 is required when absent
  double clog_max = kInfinity;     // admissible log-Hoelder constant for s, p and Q
  double beta_factor = 2.0;        // target exponent beta = beta_factor * p for the critical global case
  double tol = 1e-9;
  GradientOptions gradient;
};

// Default C_MT1: the largest c1 keeping the ball average <= 2 on the reference 16x16 grid (h = 1/16, Q = 2, s = 1,
// p = 2, log bump of radius 1/4 centred at (1/2, 1/2), r0 = 1/4), which is 2.57074139..., rounded down.
inline constexpr double kDefaultMtC1 = 2.5707;

// inf_c ||u - c||_{L^gamma(B)} by golden section (gamma^- >= 1) or grid plus refinement.
struct OffsetNorm {
  double value = 0.0;
  double offset = 0.0;
  bool heuristic = false;
};
OffsetNorm best_offset_norm(const MetricMeasureSpace& ball_space, const FunctionSample& u, const ExponentField& gamma,
                            double tol = 1e-10);

// Minimal gradient norm of u on a (restricted) space for the chosen mode.
GradientSolution minimal_gradient(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                                  const ExponentField& p, const HarnessOptions& opts);

VerificationReport check_sobolev_local(const MetricMeasureSpace& space, std::size_t x0, double r0,
                                       const FunctionSample& u, const ExponentField& s, const ExponentField& p,
                                       const ExponentField& q_dim, const HarnessOptions& opts = {});
VerificationReport check_moser_trudinger_local(const MetricMeasureSpace& space, std::size_t x0, double r0,
                                               const FunctionSample& u, const ExponentField& s, const ExponentField& p,
                                               const ExponentField& q_dim, const HarnessOptions& opts = {});
// Average of exp(c1 |u - u_B| / norm) over the ball; the Moser-Trudinger left-hand side.
double exponential_average(const MetricMeasureSpace& ball_space, const FunctionSample& u, double c1, double norm);
// Largest c1 with exponential_average <= bound (bisection in c1).
double calibrate_mt_constant(const MetricMeasureSpace& ball_space, const FunctionSample& u, double norm, double bound);

VerificationReport check_morrey_local(const MetricMeasureSpace& space, std::size_t x0, double r0,
                                      const FunctionSample& u, const ExponentField& s, const ExponentField& p,
                                      const ExponentField& q_dim, const HarnessOptions& opts = {});
VerificationReport localemb_check(const MetricMeasureSpace& space, std::size_t x0, double r0, const FunctionSample& u,
                                  const ExponentField& s, const ExponentField& p, const ExponentField& q_dim,
                                  const HarnessOptions& opts = {});

enum class GlobalTheorem { bounded, doubling_sob, doubling_mt, doubling_holder };
const char* to_string(GlobalTheorem t);
VerificationReport check_global(const MetricMeasureSpace& space, const FunctionSample& u, const ExponentField& s,
                                const ExponentField& p, const ExponentField& q_dim, GlobalTheorem theorem,
                                const HarnessOptions& opts = {});

// Lebesgue cells on the open unit ball plus an atom at the origin, u = |x|^theta.
struct CounterexampleOptions {
  int n_dim = 1;
  double beta = 0.5;
  double p = 2.0;
  double theta = 0.6;
  std::vector<double> steps{1.0 / 16, 1.0 / 32, 1.0 / 64};
  double atom = 1.0;
  GradientOptions gradient;
};
VerificationReport counterexample_run(const CounterexampleOptions& opts);
// Continuum value of int_{B(0,1)} |x|^{(theta-1)p} dx.
double counterexample_continuum_modular(int n_dim, double p, double theta);

enum class NecessityMode { sobolev_global, sobolev_local, moser, holder };
const char* to_string(NecessityMode m);

struct NecessityOptions {
  NecessityMode mode = NecessityMode::sobolev_global;
  GradientScale scale = GradientScale::lp_lq;
  double sigma = 2.0;
  double omega = 1.0;
  double mt_c1 = 1.0;
  double epsilon = 0.1;  // uniform perfectness resolution
  double r_max = 1.0;
  std::size_t max_centers = 32;
  std::size_t max_radii = 6;
  int cutoffs = 3;            // test functions u_1 .. u_cutoffs per ball
  double atom_factor = 10.0;  // an atom carries at least this multiple of the median point mass
  double tol = 1e-9;
};

// target is gamma (sobolev modes) or alpha (holder); ignored for moser.
VerificationReport necessity_run(const MetricMeasureSpace& space, const ExponentField& s, const ExponentField& p,
                                 const ExponentField& q, const std::optional<ExponentField>& target,
                                 const NecessityOptions& opts = {});
// Dimension forced by the embedding: gamma s p / (gamma - p), s p, or p (s - alpha).
std::vector<double> necessity_dimension(NecessityMode mode, const ExponentField& s, const ExponentField& p,
                                        const std::optional<ExponentField>& target);

// Norm inequalities between the gradient spaces on one instance; one report per property.
struct EmbeddingInputs {
  ExponentField s, p, q1, q2;  // q1 <= q2 pointwise
  ExponentField t;             // t < s pointwise, for the ball comparison
  std::size_t center = 0;
  double radius = 1.0;  // ball for the comparison, radius <= delta
  double delta = 1.0;
};
std::vector<VerificationReport> embeddings_suite(const MetricMeasureSpace& space, const FunctionSample& u,
                                                 const EmbeddingInputs& in, const GradientOptions& opts = {});

}  // namespace varsob
