#pragma once

// Reference implementations used only by tests. Each one follows the textbook definition directly and shares no
// code with the library, so agreement between the two is evidence for both.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double modular(const Vec& w, const Vec& u, const Vec& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += w[i] * std::pow(std::fabs(u[i]), p[i]);
  return acc;
}

// Smallest lambda with f(lambda) <= 1 for nonincreasing f, by doubling then 200 bisection steps.
inline double smallest_feasible(const std::function<double(double)>& f) {
  double hi = 1.0;
  while (f(hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (lo > 1e-300 && f(lo) <= 1.0) lo *= 0.5;
  if (f(lo) <= 1.0) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) <= 1.0 ? hi : lo) = mid;
  }
  return hi;
}

inline double luxemburg(const Vec& w, const Vec& u, const Vec& p) {
  bool zero = true;
  for (double v : u) zero = zero && v == 0.0;
  if (zero) return 0.0;
  return smallest_feasible([&](double lam) {
    Vec s(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) s[i] = u[i] / lam;
    return modular(w, s, p);
  });
}

// inf{lambda > 0 : rho_p(g / lambda^{1/q}) <= 1}, with lambda^{1/inf} = 1.
inline double level_infimum(const Vec& w, const Vec& g, const Vec& p, const Vec& q) {
  bool zero = true;
  for (double v : g) zero = zero && v == 0.0;
  if (zero) return 0.0;
  auto rho = [&](double lam) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double scale = std::isinf(q[i]) ? 1.0 : std::pow(lam, 1.0 / q[i]);
      acc += w[i] * std::pow(g[i] / scale, p[i]);
    }
    return acc;
  };
  bool finite_q = false;
  for (double v : q) finite_q = finite_q || !std::isinf(v);
  if (!finite_q) return rho(1.0) <= 1.0 ? 0.0 : kInf;
  return smallest_feasible(rho);
}

// l^q(L^p) modular and norm straight from the definition; levels[k][i].
inline double besov_modular(const Vec& w, const Matrix& levels, const Vec& p, const Vec& q) {
  double acc = 0.0;
  for (const auto& g : levels) acc += level_infimum(w, g, p, q);
  return acc;
}

inline double besov_norm(const Vec& w, const Matrix& levels, const Vec& p, const Vec& q) {
  return smallest_feasible([&](double lam) {
    Matrix scaled = levels;
    for (auto& g : scaled)
      for (double& v : g) v /= lam;
    return besov_modular(w, scaled, p, q);
  });
}

inline double tl_norm(const Vec& w, const Matrix& levels, const Vec& p, const Vec& q) {
  Vec pointwise(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double acc = 0.0;
    for (const auto& g : levels) acc = std::isinf(q[i]) ? std::max(acc, g[i]) : acc + std::pow(g[i], q[i]);
    pointwise[i] = std::isinf(q[i]) ? acc : std::pow(acc, 1.0 / q[i]);
  }
  return luxemburg(w, pointwise, p);
}

// Largest t with mu({u < t}) <= mu(E)/2: the candidates are the sample values themselves.
inline double median(const Vec& w, const Vec& u) {
  double total = 0.0;
  for (double x : w) total += x;
  double best = -kInf;
  for (double t : u) {
    double below = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i] < t) below += w[i];
    if (below <= total / 2.0) best = std::max(best, t);
  }
  return best;
}

// sup{s in [0, r] : mu(B(x, s)) <= mu(B(x, r)) / 2} for open balls, from sorted distances.
inline double phi(const Matrix& d, const Vec& w, std::size_t x, double r) {
  if (r <= 0.0) return 0.0;
  double half = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (d[x][j] < r) half += w[j];
  half /= 2.0;
  Vec dist = d[x];
  std::sort(dist.begin(), dist.end());
  dist.erase(std::unique(dist.begin(), dist.end()), dist.end());
  for (double t : dist) {
    if (t >= r) break;
    double closed = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (d[x][j] <= t) closed += w[j];
    if (closed > half) return t;  // B(x, s) contains the sphere of radius t as soon as s > t
  }
  return r;
}

// Dyadic level k with 2^{-k-1} <= d < 2^{-k}, by repeated halving.
inline int level_of(double d) {
  int k = 0;
  double upper = 1.0;  // 2^{-k}
  while (d >= upper) {
    upper *= 2.0;
    --k;
  }
  while (d < upper / 2.0) {
    upper /= 2.0;
    ++k;
  }
  return k;
}

// Exhaustive search for the minimal scalar gradient: every coordinate but the last runs over step * Z in
// [0, cap_i]; the last coordinate takes the smallest value that satisfies its constraints. Returns +inf when the
// grid misses every feasible point. The value is at least the true minimum and exceeds it by at most
// step * ||1||_{L^p} once the grid covers a minimiser.
struct GridResult {
  double value = kInf;
  Vec g;
  long long evaluated = 0;
};

inline GridResult grid_gradient(const Matrix& d, const Vec& w, const Vec& u, const Vec& s, const Vec& p,
                                double step) {
  const std::size_t n = u.size();
  GridResult out;
  Matrix coef(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) coef[i][j] = std::pow(d[i][j], s[i]);
  // g_i alone covering every pair through i is feasible; its norm bounds the search box.
  Vec alone(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) alone[i] = std::max(alone[i], std::fabs(u[i] - u[j]) / coef[i][j]);
  double best = luxemburg(w, alone, p);
  out.value = best;
  out.g = alone;
  if (n == 1 || best == 0.0) {
    out.value = best;
    return out;
  }
  const std::size_t free = n - 1;
  Vec cap(free);
  std::vector<long long> steps(free);
  for (std::size_t i = 0; i < free; ++i) {
    cap[i] = std::min(alone[i], best * std::pow(1.0 / w[i], 1.0 / p[i]));
    steps[i] = static_cast<long long>(std::floor(cap[i] / step)) + 1;
  }
  Vec g(n, 0.0);
  std::vector<long long> idx(free, 0);
  double stale = best;
  std::vector<Vec> table(free);
  auto rebuild = [&] {
    for (std::size_t i = 0; i < free; ++i) {
      table[i].resize(steps[i]);
      for (long long k = 0; k < steps[i]; ++k) table[i][k] = w[i] * std::pow(k * step / stale, p[i]);
    }
  };
  rebuild();
  const std::size_t last = n - 1;
  for (;;) {
    ++out.evaluated;
    bool ok = true;
    double partial = 0.0;
    for (std::size_t i = 0; i < free; ++i) {
      g[i] = idx[i] * step;
      partial += table[i][idx[i]];
    }
    if (partial < 1.0) {
      for (std::size_t i = 0; ok && i < free; ++i)
        for (std::size_t j = i + 1; j < free; ++j)
          if (coef[i][j] * g[i] + coef[j][i] * g[j] < std::fabs(u[i] - u[j]) * (1.0 - 1e-15)) {
            ok = false;
            break;
          }
      if (ok) {
        double need = 0.0;
        for (std::size_t j = 0; j < free; ++j)
          need = std::max(need, (std::fabs(u[last] - u[j]) - coef[j][last] * g[j]) / coef[last][j]);
        g[last] = need;
        if (partial + w[last] * std::pow(need / stale, p[last]) < 1.0) {
          const double v = luxemburg(w, g, p);
          if (v < best) {
            best = v;
            out.g = g;
            if (best < 0.999 * stale) {
              stale = best;
              rebuild();
            }
          }
        }
      }
    }
    std::size_t pos = 0;
    while (pos < free && ++idx[pos] >= steps[pos]) idx[pos++] = 0;
    if (pos == free) break;
  }
  out.value = best;
  return out;
}

inline Matrix euclidean_distances(const Matrix& coords) {
  Matrix d(coords.size(), Vec(coords.size(), 0.0));
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = 0; j < coords.size(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < coords[i].size(); ++k) acc += (coords[i][k] - coords[j][k]) * (coords[i][k] - coords[j][k]);
      d[i][j] = std::sqrt(acc);
    }
  return d;
}

}  // namespace oracle
