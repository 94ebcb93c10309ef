#include "covering_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varsob/varnorms.hpp"

namespace varsob::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool singleton(const Block& blk) { return blk.vars.size() == 1; }

// q-norm of a nonnegative vector (sup for q = inf), scaled to avoid overflow.
double qnorm(const double* x, std::size_t k, double q) {
  double top = 0.0;
  for (std::size_t a = 0; a < k; ++a) top = std::max(top, std::fabs(x[a]));
  if (top == 0.0 || k == 1 || q == kInf) return top;
  double acc = 0.0;
  for (std::size_t a = 0; a < k; ++a) acc += std::pow(std::fabs(x[a]) / top, q);
  return top * std::pow(acc, 1.0 / q);
}

double dual_exponent(double q) {
  if (q == kInf) return 1.0;
  if (q == 1.0) return kInf;
  return q / (q - 1.0);
}

// Root of an increasing function on [lo, hi] with h(lo) <= 0 <= h(hi); safeguarded Newton.
template <class H, class DH>
double increasing_root(H h, DH dh, double lo, double hi) {
  double x = hi;
  for (int it = 0; it < 100; ++it) {
    const double hx = h(x);
    if (hx == 0.0) return x;
    if (hx > 0.0)
      hi = x;
    else
      lo = x;
    const double d = dh(x);
    double nx = (d > 0.0 && std::isfinite(d)) ? x - hx / d : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) <= 1e-16 * std::max(1.0, std::fabs(x)) || hi - lo <= 1e-16 * hi) return nx;
    x = nx;
  }
  return x;
}

// argmin_{x in [0, v]} w (x/t)^p + (x - v)^2 / (2 tau) for v > 0.
double prox_scalar(double v, double tau, double w, double p, double t) {
  if (v <= 0.0) return 0.0;
  const double c = tau * w * p / std::pow(t, p);  // tau * phi'(x) = c x^{p-1}
  if (p == 1.0) return std::max(0.0, v - c);
  if (p == 2.0) return v / (1.0 + c);
  if (p > 1.0) {
    auto h = [&](double x) { return x + c * std::pow(x, p - 1.0) - v; };
    auto dh = [&](double x) { return 1.0 + c * (p - 1.0) * std::pow(x, p - 2.0); };
    return increasing_root(h, dh, 0.0, v);
  }
  // p < 1: nonconvex; compare the origin with the larger stationary point.
  auto psi = [&](double x) { return w * std::pow(x / t, p) + (x - v) * (x - v) / (2.0 * tau); };
  auto dpsi = [&](double x) { return c * std::pow(x, p - 1.0) + x - v; };  // tau * psi'
  const double xm = std::pow(c * (1.0 - p), 1.0 / (2.0 - p));
  if (xm >= v || dpsi(xm) >= 0.0) return 0.0;
  double lo = xm, hi = v;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dpsi(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double xs = 0.5 * (lo + hi);
  return psi(xs) < psi(0.0) ? xs : 0.0;
}

// Block prox for p >= 1, q >= 1: argmin_{x >= 0} phi(||x||_q) + ||x - v||^2 / (2 tau).
void prox_block_convex(const Block& blk, double tau, const double* v, double* out) {
  const std::size_t k = blk.vars.size();
  const double w = blk.w, p = blk.p, q = blk.q, t = blk.t;
  std::vector<double> vp(k);
  double vmax = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    vp[a] = std::max(0.0, v[a]);
    vmax = std::max(vmax, vp[a]);
  }
  if (vmax == 0.0) {
    std::fill(out, out + k, 0.0);
    return;
  }
  auto dphi = [&](double n) { return w * p * std::pow(n, p - 1.0) / std::pow(t, p); };
  if (p == 1.0 && qnorm(vp.data(), k, dual_exponent(q)) <= tau * w / t) {
    std::fill(out, out + k, 0.0);
    return;
  }
  if (q == kInf) {
    // x_a = min(v_a, M) with sum_a (v_a - M)^+ = tau * phi'(M).
    auto g = [&](double m) {
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a) s += std::max(0.0, vp[a] - m);
      return s - tau * dphi(m);
    };
    double lo = 0.0, hi = vmax;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * vmax; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double m = 0.5 * (lo + hi);
    for (std::size_t a = 0; a < k; ++a) out[a] = std::min(vp[a], m);
    return;
  }
  // Parametrise by N = ||x||_q: x_a(N) solves x + c(N) x^{q-1} = v_a with c(N) = tau phi'(N) N^{1-q}.
  auto fill = [&](double n, double* x) {
    const double c = tau * dphi(n) * std::pow(n, 1.0 - q);
    for (std::size_t a = 0; a < k; ++a) {
      const double va = vp[a];
      if (va == 0.0) {
        x[a] = 0.0;
      } else if (q == 1.0) {
        x[a] = std::max(0.0, va - c);
      } else if (q == 2.0) {
        x[a] = va / (1.0 + c);
      } else {
        auto h = [&](double y) { return y + c * std::pow(y, q - 1.0) - va; };
        auto dh = [&](double y) { return 1.0 + c * (q - 1.0) * std::pow(y, q - 2.0); };
        x[a] = increasing_root(h, dh, 0.0, va);
      }
    }
  };
  const double top = qnorm(vp.data(), k, q);
  double lo = 0.0, hi = top;
  std::vector<double> trial(k);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * top; ++it) {
    const double mid = 0.5 * (lo + hi);
    fill(mid, trial.data());
    if (qnorm(trial.data(), k, q) > mid)
      lo = mid;
    else
      hi = mid;
  }
  fill(0.5 * (lo + hi), out);
}

// Heuristic prox for nonconvex blocks: a few sweeps of exact coordinate minimisation by golden section.
void prox_block_heuristic(const Block& blk, double tau, const double* v, double* out) {
  const std::size_t k = blk.vars.size();
  std::vector<double> x(k);
  for (std::size_t a = 0; a < k; ++a) x[a] = std::max(0.0, v[a]);
  auto f = [&](const std::vector<double>& y) {
    double acc = blk.w * std::pow(qnorm(y.data(), k, blk.q) / blk.t, blk.p);
    for (std::size_t a = 0; a < k; ++a) acc += (y[a] - v[a]) * (y[a] - v[a]) / (2.0 * tau);
    return acc;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (std::size_t a = 0; a < k; ++a) {
      if (v[a] <= 0.0) {
        x[a] = 0.0;
        continue;
      }
      double lo = 0.0, hi = v[a];
      std::vector<double> y = x;
      auto at = [&](double s) {
        y[a] = s;
        return f(y);
      };
      double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
      double fc = at(c), fd = at(d);
      for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - g * (hi - lo);
          fc = at(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + g * (hi - lo);
          fd = at(d);
        }
      }
      const double best = 0.5 * (lo + hi);
      const double f0 = at(0.0);
      x[a] = at(best) <= f0 ? best : 0.0;
    }
  }
  std::copy(x.begin(), x.end(), out);
}

void prox_block(const Block& blk, double tau, const double* v, double* out) {
  if (singleton(blk)) {
    out[0] = prox_scalar(v[0], tau, blk.w, blk.p, blk.t);
    return;
  }
  if (blk.p >= 1.0 && blk.q >= 1.0)
    prox_block_convex(blk, tau, v, out);
  else
    prox_block_heuristic(blk, tau, v, out);
}

// phi*(y) for phi(N) = w (N/t)^p, p >= 1, y >= 0 (finite part).
double conjugate_value(const Block& blk, double y) {
  if (y <= 0.0) return 0.0;
  if (blk.p == 1.0) return (y <= blk.w / blk.t * (1.0 + 1e-15)) ? 0.0 : kInf;
  const double n = std::pow(y * std::pow(blk.t, blk.p) / (blk.w * blk.p), 1.0 / (blk.p - 1.0));
  return y * n * (1.0 - 1.0 / blk.p);
}

struct Normalised {
  std::vector<CoverRow> rows;
};

Normalised normalise(const CoverProblem& prob) {
  Normalised out;
  out.rows.reserve(prob.rows.size());
  for (const auto& r : prob.rows) {
    if (!(r.c > 0.0)) continue;
    const double s = r.a + r.b;
    out.rows.push_back(CoverRow{r.i, r.j, r.a / s, r.b / s, r.c / s});
  }
  return out;
}

}  // namespace

bool is_convex(const CoverProblem& prob) {
  for (const auto& blk : prob.blocks) {
    if (blk.p < 1.0) return false;
    if (!singleton(blk) && blk.q < 1.0) return false;
  }
  return true;
}

double block_norm(const Block& blk, const std::vector<double>& x) {
  std::vector<double> vals(blk.vars.size());
  for (std::size_t a = 0; a < vals.size(); ++a) vals[a] = x[blk.vars[a]];
  return qnorm(vals.data(), vals.size(), blk.q);
}

double objective(const CoverProblem& prob, const std::vector<double>& x) {
  double acc = 0.0;
  for (const auto& blk : prob.blocks) {
    const double n = block_norm(blk, x);
    if (n > 0.0) acc += blk.w * std::pow(n / blk.t, blk.p);
  }
  return acc;
}

void repair(const CoverProblem& prob, std::vector<double>& x) {
  for (const auto& r : prob.rows) {
    const double have = r.a * x[r.i] + r.b * x[r.j];
    if (have < r.c) {
      const double lift = (r.c - have) / (r.a + r.b) * (1.0 + 1e-14);
      x[r.i] += lift;
      x[r.j] += lift;
    }
  }
}

double max_violation(const CoverProblem& prob, const std::vector<double>& x) {
  double worst = 0.0, scale = 0.0;
  for (const auto& r : prob.rows) {
    scale = std::max(scale, r.c);
    worst = std::max(worst, r.c - r.a * x[r.i] - r.b * x[r.j]);
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

namespace {

// Dual value for multipliers on the normalised rows, with the best uniform rescaling theta in [0, theta_max].
double dual_bound_rows(const CoverProblem& prob, const std::vector<CoverRow>& rows, const std::vector<double>& lambda_in) {
  if (!is_convex(prob)) return -kInf;
  std::vector<double> lambda = lambda_in;
  std::vector<double> z(prob.num_vars, 0.0);
  double lin = 0.0;
  auto accumulate = [&] {
    std::fill(z.begin(), z.end(), 0.0);
    lin = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double l = lambda[r];
      if (!(l > 0.0)) continue;
      z[rows[r].i] += rows[r].a * l;
      z[rows[r].j] += rows[r].b * l;
      lin += rows[r].c * l;
    }
  };
  std::vector<double> nz(prob.blocks.size());
  auto block_norms = [&] {
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      const Block& blk = prob.blocks[b];
      std::vector<double> vals(blk.vars.size());
      for (std::size_t a = 0; a < vals.size(); ++a) vals[a] = z[blk.vars[a]];
      nz[b] = singleton(blk) ? vals[0] : qnorm(vals.data(), vals.size(), dual_exponent(blk.q));
    }
  };
  accumulate();
  if (lin <= 0.0) return 0.0;
  block_norms();
  // Linear blocks need ||z_B||_{q'} <= w/t. Shrinking every row by the worse factor of its two blocks restores
  // this locally, which loses far less than one global factor.
  std::vector<double> factor(prob.num_vars, 1.0);
  bool shrink = false;
  for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
    const Block& blk = prob.blocks[b];
    if (blk.p != 1.0 || !(nz[b] > 0.0)) continue;
    const double f = std::min(1.0, blk.w / blk.t / nz[b]);
    if (f < 1.0) shrink = true;
    for (auto v : blk.vars) factor[v] = f;
  }
  if (shrink) {
    for (std::size_t r = 0; r < rows.size(); ++r) lambda[r] *= std::min(factor[rows[r].i], factor[rows[r].j]);
    accumulate();
    if (lin <= 0.0) return 0.0;
    block_norms();
  }
  double theta_max = kInf;
  for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
    const Block& blk = prob.blocks[b];
    if (blk.p == 1.0 && nz[b] > 0.0) theta_max = std::min(theta_max, blk.w / blk.t / nz[b]);
  }
  auto value = [&](double theta) {
    double acc = theta * lin;
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) acc -= conjugate_value(prob.blocks[b], theta * nz[b]);
    return acc;
  };
  // Concave in theta; golden section on [0, hi].
  double hi = std::isfinite(theta_max) ? theta_max : 1.0;
  if (!std::isfinite(theta_max)) {
    while (value(2.0 * hi) > value(hi) && hi < 1e12) hi *= 2.0;
    hi *= 2.0;
  }
  double lo = 0.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 100; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = value(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = value(d);
    }
  }
  double best = std::max({value(0.5 * (lo + hi)), fc, fd, 0.0});
  if (std::isfinite(theta_max)) best = std::max(best, value(theta_max));
  return best;
}

}  // namespace

double dual_bound(const CoverProblem& prob, const std::vector<double>& lambda) {
  const Normalised nrm = normalise(prob);
  return dual_bound_rows(prob, nrm.rows, lambda);
}

namespace {

// Preconditioned primal-dual hybrid gradient with adaptive restarts. Used for the nonconvex blocks, where it acts
// as a local heuristic.
CoverSolution solve_first_order(const CoverProblem& prob, const SolverOptions& opts, const std::vector<double>* warm_x,
                                const std::vector<double>* warm_lambda) {
  const Normalised nrm = normalise(prob);
  const auto& rows = nrm.rows;
  const std::size_t n = prob.num_vars;
  const std::size_t m = rows.size();
  CoverSolution sol;
  sol.x.assign(n, 0.0);
  sol.lambda.assign(m, 0.0);
  if (m == 0) {
    sol.converged = true;
    return sol;
  }

  std::vector<double> colsum(n, 0.0);
  for (const auto& r : rows) {
    colsum[r.i] += r.a;
    colsum[r.j] += r.b;
  }
  std::vector<double> block_tau(prob.blocks.size());
  for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
    double tmin = kInf;
    for (auto v : prob.blocks[b].vars) tmin = std::min(tmin, colsum[v] > 0.0 ? 1.0 / colsum[v] : kInf);
    block_tau[b] = std::isfinite(tmin) ? tmin : 1.0;
  }
  std::vector<double> tau(n, 1.0);
  for (std::size_t b = 0; b < prob.blocks.size(); ++b)
    for (auto v : prob.blocks[b].vars) tau[v] = block_tau[b];
  // Row step sizes are 1 / (a + b) = 1 after normalisation. A primal weight omega rebalances the two steps.
  double omega = 1.0;

  std::vector<double> x(n, 0.0), lambda(m, 0.0);
  if (warm_x && warm_x->size() == n) x = *warm_x;
  if (warm_lambda && warm_lambda->size() == m) lambda = *warm_lambda;
  if (!warm_x) repair(prob, x);

  std::vector<double> z(n), v(n), xn(n), buf_in, buf_out;
  std::vector<double> x_avg(n, 0.0), l_avg(m, 0.0);
  std::vector<double> x_last_restart = x, l_last_restart = lambda;
  int avg_count = 0;

  std::vector<double> best_x = x;
  repair(prob, best_x);
  double best_primal = objective(prob, best_x);
  double best_dual = dual_bound_rows(prob, rows, lambda);
  std::vector<double> best_lambda = lambda;
  double last_gap = kInf;
  int since_restart = 0;

  auto gap_of = [&](double p, double d) { return p - d; };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double l = lambda[r];
      if (l == 0.0) continue;
      z[rows[r].i] += rows[r].a * l;
      z[rows[r].j] += rows[r].b * l;
    }
    for (std::size_t k = 0; k < n; ++k) v[k] = x[k] + omega * tau[k] * z[k];
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      const Block& blk = prob.blocks[b];
      const std::size_t k = blk.vars.size();
      buf_in.resize(k);
      buf_out.resize(k);
      for (std::size_t a = 0; a < k; ++a) buf_in[a] = v[blk.vars[a]];
      prox_block(blk, omega * block_tau[b], buf_in.data(), buf_out.data());
      for (std::size_t a = 0; a < k; ++a) xn[blk.vars[a]] = buf_out[a];
    }
    for (std::size_t r = 0; r < m; ++r) {
      const auto& row = rows[r];
      const double xb_i = 2.0 * xn[row.i] - x[row.i];
      const double xb_j = 2.0 * xn[row.j] - x[row.j];
      lambda[r] = std::max(0.0, lambda[r] + (row.c - row.a * xb_i - row.b * xb_j) / omega);
    }
    x.swap(xn);
    for (std::size_t k = 0; k < n; ++k) x_avg[k] += x[k];
    for (std::size_t r = 0; r < m; ++r) l_avg[r] += lambda[r];
    ++avg_count;
    ++since_restart;

    if ((it + 1) % opts.check_every != 0) continue;

    // Evaluate the current and averaged iterates.
    std::vector<double> xa(n), la(m);
    for (std::size_t k = 0; k < n; ++k) xa[k] = x_avg[k] / avg_count;
    for (std::size_t r = 0; r < m; ++r) la[r] = l_avg[r] / avg_count;
    double cur_gap = kInf;
    bool use_avg = false;
    for (int which = 0; which < 2; ++which) {
      std::vector<double> xr = which == 0 ? x : xa;
      repair(prob, xr);
      const double pv = objective(prob, xr);
      const double dv = dual_bound_rows(prob, rows, which == 0 ? lambda : la);
      if (pv < best_primal) {
        best_primal = pv;
        best_x = xr;
      }
      if (dv > best_dual) {
        best_dual = dv;
        best_lambda = which == 0 ? lambda : la;
      }
      const double g = gap_of(pv, dv);
      if (g < cur_gap) {
        cur_gap = g;
        use_avg = which == 1;
      }
    }
    const double scale = std::max(std::fabs(best_primal), 1e-300);
    if (best_primal - best_dual <= opts.rel_gap * scale) {
      sol.converged = true;
      ++it;
      break;
    }
    // Adaptive restart: restart from the better candidate once the gap has shrunk enough since the last restart.
    if (cur_gap <= 0.2 * last_gap || since_restart >= 64 * opts.check_every) {
      const std::vector<double>& rx = use_avg ? xa : x;
      const std::vector<double>& rl = use_avg ? la : lambda;
      double dx = 0.0, dl = 0.0;
      for (std::size_t k = 0; k < n; ++k) dx += (rx[k] - x_last_restart[k]) * (rx[k] - x_last_restart[k]) / tau[k];
      for (std::size_t r = 0; r < m; ++r) dl += (rl[r] - l_last_restart[r]) * (rl[r] - l_last_restart[r]);
      if (dx > 0.0 && dl > 0.0) {
        const double target = std::sqrt(dl / dx);
        omega = std::exp(0.5 * std::log(target) + 0.5 * std::log(omega));
        omega = std::clamp(omega, 1e-6, 1e6);
      }
      x = rx;
      lambda = rl;
      x_last_restart = x;
      l_last_restart = lambda;
      std::fill(x_avg.begin(), x_avg.end(), 0.0);
      std::fill(l_avg.begin(), l_avg.end(), 0.0);
      avg_count = 0;
      last_gap = cur_gap;
      since_restart = 0;
    }
  }
  sol.iterations = it;
  sol.x = best_x;
  sol.primal = best_primal;
  sol.dual = best_dual;
  sol.lambda = best_lambda;
  sol.violation = max_violation(prob, sol.x);
  return sol;
}

}  // namespace


namespace {

// Log-barrier model of a convex instance. Blocks with q = inf and several variables get an epigraph variable N_B
// with constraints N_B >= x_a; every other block is smooth on the open orthant.
struct BarrierModel {
  const CoverProblem& prob;
  const std::vector<CoverRow>& rows;
  std::size_t n = 0;
  std::size_t nv = 0;
  std::vector<std::ptrdiff_t> epi;
  std::size_t constraint_count = 0;

  BarrierModel(const CoverProblem& p, const std::vector<CoverRow>& r) : prob(p), rows(r) {
    n = prob.num_vars;
    nv = n;
    constraint_count = rows.size() + n;
    epi.assign(prob.blocks.size(), -1);
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      const Block& blk = prob.blocks[b];
      if (!singleton(blk) && blk.q == kInf) {
        epi[b] = static_cast<std::ptrdiff_t>(nv++);
        constraint_count += blk.vars.size();
      }
    }
  }

  static void terms(const Block& blk, double nrm, double& h, double& h1, double& h2) {
    const double tp = std::pow(blk.t, blk.p);
    h = blk.w * std::pow(nrm, blk.p) / tp;
    h1 = blk.w * blk.p * std::pow(nrm, blk.p - 1.0) / tp;
    h2 = blk.p == 1.0 ? 0.0 : blk.w * blk.p * (blk.p - 1.0) * std::pow(nrm, blk.p - 2.0) / tp;
  }

  double objective_at(const std::vector<double>& y) const {
    double acc = 0.0;
    std::vector<double> vals;
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      const Block& blk = prob.blocks[b];
      double nrm;
      if (epi[b] >= 0) {
        nrm = y[static_cast<std::size_t>(epi[b])];
      } else if (singleton(blk)) {
        nrm = y[blk.vars[0]];
      } else {
        vals.resize(blk.vars.size());
        for (std::size_t a = 0; a < vals.size(); ++a) vals[a] = y[blk.vars[a]];
        nrm = qnorm(vals.data(), vals.size(), blk.q);
      }
      if (nrm > 0.0) acc += blk.w * std::pow(nrm / blk.t, blk.p);
    }
    return acc;
  }

  // tau * F(y) - sum log(slacks); +inf outside the open domain.
  double value(const std::vector<double>& y, double tau) const {
    double bar = 0.0;
    for (const auto& r : rows) {
      const double s = r.a * y[r.i] + r.b * y[r.j] - r.c;
      if (!(s > 0.0)) return kInf;
      bar -= std::log(s);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(y[j] > 0.0)) return kInf;
      bar -= std::log(y[j]);
    }
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      if (epi[b] < 0) continue;
      const double nb = y[static_cast<std::size_t>(epi[b])];
      for (auto v : prob.blocks[b].vars) {
        const double gap = nb - y[v];
        if (!(gap > 0.0)) return kInf;
        bar -= std::log(gap);
      }
    }
    return tau * objective_at(y) + bar;
  }

  void assemble(const std::vector<double>& y, double tau, std::vector<double>& g, std::vector<double>& h) const {
    g.assign(nv, 0.0);
    h.assign(nv * nv, 0.0);
    auto H = [&](std::size_t r, std::size_t c) -> double& { return h[r * nv + c]; };
    for (const auto& r : rows) {
      const double s = r.a * y[r.i] + r.b * y[r.j] - r.c;
      const double is = 1.0 / s, is2 = is * is;
      g[r.i] -= r.a * is;
      g[r.j] -= r.b * is;
      H(r.i, r.i) += r.a * r.a * is2;
      H(r.j, r.j) += r.b * r.b * is2;
      H(r.i, r.j) += r.a * r.b * is2;
      H(r.j, r.i) += r.a * r.b * is2;
    }
    for (std::size_t j = 0; j < n; ++j) {
      g[j] -= 1.0 / y[j];
      H(j, j) += 1.0 / (y[j] * y[j]);
    }
    std::vector<double> vals, unit;
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      const Block& blk = prob.blocks[b];
      double f0, f1, f2;
      if (epi[b] >= 0) {
        const auto e = static_cast<std::size_t>(epi[b]);
        for (auto v : blk.vars) {
          const double ig = 1.0 / (y[e] - y[v]), ig2 = ig * ig;
          g[v] += ig;
          g[e] -= ig;
          H(v, v) += ig2;
          H(e, e) += ig2;
          H(v, e) -= ig2;
          H(e, v) -= ig2;
        }
        terms(blk, y[e], f0, f1, f2);
        g[e] += tau * f1;
        H(e, e) += tau * f2;
        continue;
      }
      if (singleton(blk)) {
        const auto v = blk.vars[0];
        terms(blk, y[v], f0, f1, f2);
        g[v] += tau * f1;
        H(v, v) += tau * f2;
        continue;
      }
      const std::size_t k = blk.vars.size();
      vals.resize(k);
      unit.resize(k);
      for (std::size_t a = 0; a < k; ++a) vals[a] = y[blk.vars[a]];
      const double nrm = qnorm(vals.data(), k, blk.q);
      terms(blk, nrm, f0, f1, f2);
      for (std::size_t a = 0; a < k; ++a) unit[a] = blk.q == 1.0 ? 1.0 : std::pow(vals[a] / nrm, blk.q - 1.0);
      for (std::size_t a = 0; a < k; ++a) {
        const auto va = blk.vars[a];
        g[va] += tau * f1 * unit[a];
        for (std::size_t c = 0; c < k; ++c) {
          const auto vc = blk.vars[c];
          double hv = f2 * unit[a] * unit[c];
          if (blk.q != 1.0) {
            double inner = -unit[a] * unit[c];
            if (a == c) inner += std::pow(vals[a] / nrm, blk.q - 2.0);
            hv += f1 * (blk.q - 1.0) / nrm * inner;
          }
          H(va, vc) += tau * hv;
        }
      }
    }
  }

  // Largest step keeping y + alpha * d in the open domain.
  double max_step(const std::vector<double>& y, const std::vector<double>& d) const {
    double alpha = kInf;
    for (const auto& r : rows) {
      const double ds = r.a * d[r.i] + r.b * d[r.j];
      if (ds < 0.0) alpha = std::min(alpha, -(r.a * y[r.i] + r.b * y[r.j] - r.c) / ds);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (d[j] < 0.0) alpha = std::min(alpha, -y[j] / d[j]);
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      if (epi[b] < 0) continue;
      const auto e = static_cast<std::size_t>(epi[b]);
      for (auto v : prob.blocks[b].vars) {
        const double dg = d[e] - d[v];
        if (dg < 0.0) alpha = std::min(alpha, -(y[e] - y[v]) / dg);
      }
    }
    return alpha;
  }
};

// In-place Cholesky of a dense symmetric matrix; false when not positive definite.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = &a[j * n];
    double d = rj[j];
    for (std::size_t k = 0; k < j; ++k) d -= rj[k] * rj[k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    rj[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* ri = &a[i * n];
      double v = ri[j];
      for (std::size_t k = 0; k < j; ++k) v -= ri[k] * rj[k];
      ri[j] = v / d;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * b[k];
    b[i] = v / l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= l[k * n + i] * b[k];
    b[i] = v / l[i * n + i];
  }
}

CoverSolution solve_barrier(const CoverProblem& prob, const SolverOptions& opts) {
  const Normalised nrm = normalise(prob);
  const auto& rows = nrm.rows;
  BarrierModel model(prob, rows);
  const std::size_t nv = model.nv;
  CoverSolution sol;

  // Strictly feasible start: every variable at twice the largest demand of its rows.
  double base = 0.0;
  for (const auto& r : rows) base = std::max(base, r.c);
  std::vector<double> y(nv, 0.0);
  for (const auto& r : rows) {
    y[r.i] = std::max(y[r.i], 2.0 * r.c);
    y[r.j] = std::max(y[r.j], 2.0 * r.c);
  }
  for (std::size_t j = 0; j < prob.num_vars; ++j) y[j] = std::max(y[j], 1e-3 * base);
  for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
    if (model.epi[b] < 0) continue;
    double top = 0.0;
    for (auto v : prob.blocks[b].vars) top = std::max(top, y[v]);
    y[static_cast<std::size_t>(model.epi[b])] = 1.5 * top;
  }

  const double mcount = static_cast<double>(model.constraint_count);
  double tau = mcount / std::max(model.objective_at(y), 1e-300);
  std::vector<double> g, h, d(nv), trial(nv), lambda(rows.size());
  double best_primal = kInf, best_dual = -kInf;
  std::vector<double> best_x, best_lambda;
  int newton = 0, stalled = 0;
  double last_gap = kInf;
  bool done = false;
  while (!done) {
    // Centering by damped Newton.
    for (int inner = 0; inner < 100 && newton < opts.max_newton; ++inner, ++newton) {
      model.assemble(y, tau, g, h);
      double ridge = 0.0;
      std::vector<double> fac;
      for (int attempt = 0; attempt < 8; ++attempt) {
        fac = h;
        if (ridge > 0.0)
          for (std::size_t j = 0; j < nv; ++j) fac[j * nv + j] += ridge;
        if (cholesky(fac, nv)) break;
        double top = 0.0;
        for (std::size_t j = 0; j < nv; ++j) top = std::max(top, h[j * nv + j]);
        ridge = ridge == 0.0 ? 1e-14 * top : ridge * 100.0;
        fac.clear();
      }
      if (fac.empty()) break;
      for (std::size_t j = 0; j < nv; ++j) d[j] = -g[j];
      cholesky_solve(fac, nv, d);
      double dec = 0.0;
      for (std::size_t j = 0; j < nv; ++j) dec -= g[j] * d[j];
      if (dec < 1e-7) break;
      double alpha = std::min(1.0, 0.99 * model.max_step(y, d));
      const double f0 = model.value(y, tau);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t j = 0; j < nv; ++j) trial[j] = y[j] + alpha * d[j];
        const double f1 = model.value(trial, tau);
        // Past tau ~ 1e10 the barrier value carries rounding noise larger than the decrement.
        if (f1 <= f0 - 0.25 * alpha * dec + 1e-13 * std::fabs(f0)) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      y.swap(trial);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      lambda[r] = 1.0 / (tau * (row.a * y[row.i] + row.b * y[row.j] - row.c));
    }
    std::vector<double> x(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(prob.num_vars));
    repair(prob, x);
    const double pv = objective(prob, x);
    const double dv = dual_bound_rows(prob, rows, lambda);
    if (pv < best_primal) {
      best_primal = pv;
      best_x = x;
    }
    if (dv > best_dual) {
      best_dual = dv;
      best_lambda = lambda;
    }
    const double gap = best_primal - best_dual;
    if (gap < 0.9 * last_gap) {
      stalled = 0;
    } else {
      ++stalled;
    }
    last_gap = std::min(last_gap, gap);
    if (best_primal - best_dual <= opts.rel_gap * best_primal) {
      sol.converged = true;
      done = true;
    } else if (newton >= opts.max_newton || mcount / tau < 1e-13 * best_primal || stalled >= 3) {
      done = true;
    }
    tau *= 8.0;
  }
  sol.x = best_x;
  sol.lambda = best_lambda;
  sol.primal = best_primal;
  sol.dual = best_dual;
  sol.iterations = newton;
  sol.violation = max_violation(prob, sol.x);
  return sol;
}

}  // namespace

CoverSolution solve_cover(const CoverProblem& prob, const SolverOptions& opts, const std::vector<double>* warm_x,
                          const std::vector<double>* warm_lambda) {
  bool any = false;
  for (const auto& r : prob.rows) any = any || r.c > 0.0;
  if (!any) {
    CoverSolution sol;
    sol.x.assign(prob.num_vars, 0.0);
    sol.lambda.assign(prob.rows.size(), 0.0);
    sol.converged = true;
    return sol;
  }
  if (is_convex(prob)) return solve_barrier(prob, opts);
  CoverSolution sol = solve_first_order(prob, opts, warm_x, warm_lambda);
  sol.heuristic = true;
  sol.dual = -kInf;
  return sol;
}

double block_luxemburg(const CoverProblem& prob, const std::vector<double>& x, double tol) {
  std::vector<double> w, nv, p;
  for (const auto& blk : prob.blocks) {
    w.push_back(blk.w);
    nv.push_back(block_norm(blk, x));
    p.push_back(blk.p);
  }
  return luxemburg(w, nv, p, tol).value;
}

namespace {

void set_scale(CoverProblem& prob, double t) {
  for (auto& blk : prob.blocks) blk.t = t;
}

// Largest t with dual_bound(t) >= 1, i.e. a certified lower bound on the minimal Luxemburg norm.
double certified_lower(CoverProblem prob, const std::vector<double>& lambda, double t_hint) {
  if (!is_convex(prob)) return 0.0;
  const Normalised nrm = normalise(prob);
  auto ok = [&](double t) {
    set_scale(prob, t);
    return dual_bound_rows(prob, nrm.rows, lambda) >= 1.0;
  };
  double lo = t_hint, hi = t_hint;
  int guard = 0;
  while (!ok(lo)) {
    lo *= 0.5;
    if (++guard > 200) return 0.0;
  }
  guard = 0;
  while (ok(hi)) {
    hi *= 2.0;
    if (++guard > 200) break;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

NormSearch minimize_block_norm(CoverProblem prob, const SolverOptions& opts, double tol) {
  NormSearch out;
  out.x.assign(prob.num_vars, 0.0);
  bool any = false;
  for (const auto& r : prob.rows) any = any || r.c > 0.0;
  if (!any) {
    out.converged = true;
    return out;
  }
  double pmin = kInf, pmax = 0.0;
  for (const auto& blk : prob.blocks) {
    pmin = std::min(pmin, blk.p);
    pmax = std::max(pmax, blk.p);
  }
  set_scale(prob, 1.0);
  CoverSolution s = solve_cover(prob, opts);
  out.solves = 1;
  out.iterations = s.iterations;
  out.heuristic = s.heuristic;
  if (pmin == pmax) {
    // Homogeneity: min rho(g / t) = t^{-p} min rho(g).
    out.x = s.x;
    out.lambda = s.lambda;
    out.upper = block_luxemburg(prob, s.x, tol * 1e-2);
    out.lower = s.dual > 0.0 ? std::pow(s.dual, 1.0 / pmin) : 0.0;
    out.converged = s.converged;
    out.violation = s.violation;
    return out;
  }
  // Variable exponent: solve log F(e^v) = 0 for v = log t, where F(t) = min rho(g / t). The slope in v lies in
  // [-p^+, -p^-], which gives the first step and keeps the secant iteration bracketed.
  std::vector<double> best_x = s.x, best_lambda = s.lambda;
  double best_upper = block_luxemburg(prob, s.x, tol * 1e-2);
  bool all_converged = s.converged;
  double v0 = 0.0, f0 = std::log(s.primal);
  double lo = -kInf, hi = kInf, flo = 0.0, fhi = 0.0;
  auto note = [&](double v, double f) {
    if (f > 0.0) {
      lo = v;
      flo = f;
    } else {
      hi = v;
      fhi = f;
    }
  };
  note(v0, f0);
  double v = v0 + f0 / (f0 > 0.0 ? pmax : pmin);
  double prev_v = v0, prev_f = f0;
  for (int step = 0; step < 40; ++step) {
    // Early solves only need to resolve the sign of log F.
    SolverOptions step_opts = opts;
    step_opts.rel_gap = std::max(opts.rel_gap, std::min(1e-3, 1e-2 * std::fabs(prev_f)));
    set_scale(prob, std::exp(v));
    CoverSolution st = solve_cover(prob, step_opts);
    ++out.solves;
    out.iterations += st.iterations;
    all_converged = all_converged && st.converged;
    out.heuristic = out.heuristic || st.heuristic;
    set_scale(prob, 1.0);
    const double u = block_luxemburg(prob, st.x, tol * 1e-2);
    if (u < best_upper) {
      best_upper = u;
      best_x = st.x;
      best_lambda = st.lambda;
    }
    const double f = std::log(st.primal);
    note(v, f);
    if (std::fabs(f) <= std::max(pmin * tol, 2.0 * opts.rel_gap) && step_opts.rel_gap <= opts.rel_gap) break;
    if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= tol) break;
    // Secant step with the slope clipped to [p^-, p^+], kept inside the bracket once one exists.
    double slope = (prev_f - f) / (v - prev_v);
    if (!std::isfinite(slope)) slope = pmin;
    slope = std::clamp(slope, pmin, pmax);
    double nv = v + f / slope;
    if (std::isfinite(lo) && std::isfinite(hi) && !(nv > lo && nv < hi)) nv = 0.5 * (lo + hi);
    prev_v = v;
    prev_f = f;
    v = nv;
  }
  out.x = best_x;
  out.upper = best_upper;
  out.lambda = best_lambda;
  out.converged = all_converged;
  out.violation = max_violation(prob, best_x);
  set_scale(prob, 1.0);
  out.lower = certified_lower(prob, best_lambda, best_upper);
  return out;
}

}  // namespace varsob::detail
