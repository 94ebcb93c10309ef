#include "varsob/constants.hpp"

#include <algorithm>
#include <cmath>

#include "varsob/error.hpp"

namespace varsob::constants {

double overlap_bound(double doubling_constant, double ratio) {
  const double m = doubling_constant;
  return m * m * m * std::pow(ratio, std::log2(m));
}

namespace {

void require_cutoff_exponents(double q_minus, double s_minus, double s_plus) {
  require(std::isfinite(q_minus) && q_minus > 0.0, "cut-off constants need a finite q^- > 0");
  require(s_minus > 0.0 && s_plus < 1.0 && s_minus <= s_plus, "cut-off constants need 0 < s^- <= s^+ < 1");
}

}  // namespace

double lipschitz_a1(double q_minus, double s_minus, double s_plus) {
  require_cutoff_exponents(q_minus, s_minus, s_plus);
  const double q = q_minus;
  const double inner = std::pow(4.0, q) / (1.0 - std::pow(2.0, -q * s_minus)) +
                       1.0 / (1.0 - std::pow(2.0, -q * (1.0 - s_plus)));
  return std::pow(inner, 1.0 / q);
}

double lipschitz_a2(double q_minus, double s_minus, double s_plus) {
  require_cutoff_exponents(q_minus, s_minus, s_plus);
  const double q = q_minus;
  const double low = std::pow(std::pow(2.0, 2.0 * q + 1.0) / (1.0 - std::pow(2.0, -s_minus * q)), 1.0 / q);
  const double high = std::pow(2.0 / (1.0 - std::pow(2.0, -q * (1.0 - s_plus))), 1.0 / q);
  return std::pow(2.0, 1.0 / q) * (low + high);
}

double lipschitz_a2_printed(double q_minus, double s_minus, double s_plus) {
  require_cutoff_exponents(q_minus, s_minus, s_plus);
  const double q = q_minus;
  const double low = std::pow(std::pow(2.0, 2.0 * q + 1.0) / (1.0 - std::pow(2.0, -s_minus * q)), 1.0 / q);
  const double high = std::pow(2.0 / std::pow(1.0 - std::pow(2.0, -q * (1.0 - s_plus)), 1.0 / q), 1.0 / q);
  return std::pow(2.0, 1.0 / q) * (low + high);
}

double zeta(double p_minus, double p_plus, double gap_minus, double gap_plus, double delta) {
  require(gap_minus > 0.0, "zeta needs s >> t");
  require(delta > 0.0, "zeta needs delta > 0");
  const double base = 4.0 * delta;
  const double top = std::max(std::pow(base, gap_plus * p_plus), std::pow(base, gap_minus * p_minus));
  const double rho = top / (1.0 - std::pow(2.0, -p_minus * gap_minus));
  return std::max(std::pow(rho, 1.0 / p_minus), std::pow(rho, 1.0 / p_plus));
}

double localemb_lambda(double kappa_value, double ball_measure, double exponent_minus, double unit_norm_gamma) {
  return kappa_value * kappa_value * std::max(2.0, std::pow(2.0 / ball_measure, 1.0 / exponent_minus)) *
         unit_norm_gamma;
}

double holder_dh(double alpha_plus, double c_h, double sigma, double delta, double r0) {
  require(sigma > 1.0, "the Holder constant needs sigma > 1");
  return std::pow(2.0, alpha_plus + 1.0) * c_h * std::pow(sigma * delta / ((sigma - 1.0) * r0), alpha_plus);
}

double rescale_threshold(double b, double delta, double delta_prime, double q_plus) {
  require(delta > 0.0 && delta_prime >= delta, "threshold rescaling needs delta' >= delta > 0");
  return b * std::pow(delta / delta_prime, q_plus);
}

NecessityChain necessity_chain(const NecessityInputs& in) {
  NecessityChain out;
  const double qp = in.q_dim_plus;
  out.r_prime = 0.5 * std::min(0.25, 0.5 * std::exp(-in.clog_reciprocal_gamma * qp / in.s_minus));
  out.eta = in.s_minus / qp - in.clog_reciprocal_gamma / std::log(1.0 / (2.0 * out.r_prime));
  const double eta = out.eta;
  const double head = std::max(1.0, in.embedding_constant * in.cutoff_constant * std::pow(4.0, in.s_plus));
  const double c1_inv = std::pow(head, 1.0 / eta) *
                        std::pow(2.0, in.s_plus / (in.gamma_minus * eta * eta) + in.s_plus / eta);
  out.c1 = 1.0 / c1_inv;
  out.c2 = std::pow(std::exp(-in.clog_s) * std::pow(2.0, -in.s_plus), 1.0 / eta) *
           std::pow(std::exp(-in.clog_gamma) * std::pow(2.0, -in.gamma_plus),
                    qp / (eta * in.gamma_minus * in.gamma_minus));
  out.b = out.c1 * out.c2 * std::exp(-in.clog_q_dim) * std::pow(2.0, in.q_dim_minus - qp);
  return out;
}

double kappa(double p_minus) { return std::pow(2.0, 1.0 / p_minus); }

}  // namespace varsob::constants
