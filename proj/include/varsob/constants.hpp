#pragma once

// Closed-form constants from the embedding arguments, evaluated so reports can show a formula constant next to
// the empirically measured one. Arguments are the relevant exponent bounds, never whole fields.

#include <string>

namespace varsob::constants {

// Overlap bound for bounded-overlap covers: M^3 (R/r)^{log2 M}.
double overlap_bound(double doubling_constant, double ratio);

// Cut-off gradient constants. Require q_minus finite and s_plus < 1.
double lipschitz_a1(double q_minus, double s_minus, double s_plus);
// Sum-of-two-tails constant for the l^q(L^p) bound, with the second term read as (2 / (1 - 2^{-q(1-s^+)}))^{1/q}.
double lipschitz_a2(double q_minus, double s_minus, double s_plus);
// The same constant with the second term exactly as printed: (2 / (1 - 2^{-q(1-s^+)})^{1/q})^{1/q}.
double lipschitz_a2_printed(double q_minus, double s_minus, double s_plus);
// Constants for q^- = infinity: pointwise sup bound 4, level sup bound 5.
inline constexpr double kLipschitzSupPointwise = 4.0;
inline constexpr double kLipschitzSupLevels = 5.0;

// Besov(s, p, q) to Sobolev(t, p) comparison on balls of radius <= delta.
double zeta(double p_minus, double p_plus, double gap_minus, double gap_plus, double delta);

// Local embedding factor kappa^2 max{2, (2/mu)^{1/e}} ||1||_{L^gamma(B0)}.
double localemb_lambda(double kappa, double ball_measure, double exponent_minus, double unit_norm_gamma);

// Holder constant D_H = 2^{alpha^+ + 1} C_H (sigma delta / ((sigma - 1) r0))^{alpha^+}.
double holder_dh(double alpha_plus, double c_h, double sigma, double delta, double r0);

// Threshold change for lower regularity constants: b (delta / delta')^{Q^+}.
double rescale_threshold(double b, double delta, double delta_prime, double q_plus);

// Lower-regularity constant forced by a global embedding into L^gamma (test functions on shrinking annuli).
struct NecessityInputs {
  double embedding_constant = 1.0;  // C_{S,G}
  double cutoff_constant = 1.0;     // C_lip
  double s_minus = 1.0, s_plus = 1.0;
  double gamma_minus = 1.0, gamma_plus = 1.0;
  double q_dim_minus = 1.0, q_dim_plus = 1.0;
  double clog_reciprocal_gamma = 0.0;  // C_log(1/gamma)
  double clog_gamma = 0.0;             // C_log(gamma)
  double clog_s = 0.0;                 // C_log(s)
  double clog_q_dim = 0.0;             // C_log(Q)
};

struct NecessityChain {
  double r_prime = 0.0;  // radii below r' are covered by the chain
  double eta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double b = 0.0;
};

NecessityChain necessity_chain(const NecessityInputs& in);

// Quasi-triangle constant used throughout: 2^{1/p^-}.
double kappa(double p_minus);

}  // namespace varsob::constants
