#pragma once

// Convex minimisation over covering constraints a*x_i + b*x_j >= c (a, b > 0, x >= 0) with a block objective
//   F(x) = sum_B w_B * (||x_B||_{q_B} / t_B)^{p_B}.
// Convex instances (p >= 1, q >= 1) are solved by a log-barrier interior point method; nonconvex ones by a
// preconditioned primal-dual hybrid gradient iteration used as a local heuristic. Returned points are always
// feasible (a final repair pass raises endpoints of violated rows) and convex solves come with a Lagrangian lower
// bound.

#include <cstdint>
#include <functional>
#include <vector>

namespace varsob::detail {

struct CoverRow {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct Block {
  std::vector<std::uint32_t> vars;
  double w = 1.0;
  double p = 1.0;
  double q = 1.0;  // ignored for single-variable blocks
  double t = 1.0;
};

struct CoverProblem {
  std::size_t num_vars = 0;
  std::vector<CoverRow> rows;
  std::vector<Block> blocks;  // partition of the variables
};

struct SolverOptions {
  int max_iter = 200000;  // first-order iterations (nonconvex instances)
  int max_newton = 600;   // Newton steps in total (convex instances)
  double rel_gap = 1e-8;
  int check_every = 32;
};

struct CoverSolution {
  std::vector<double> x;       // feasible
  std::vector<double> lambda;  // row multipliers (for warm starts and bounds)
  double primal = 0.0;         // F(x)
  double dual = 0.0;           // certified lower bound on min F (may be -inf when unavailable)
  double violation = 0.0;      // max_r (c_r - a x_i - b x_j)^+ after repair, relative to max c
  int iterations = 0;
  bool converged = false;
  bool heuristic = false;  // nonconvex instance: local solution, no certificate
};

bool is_convex(const CoverProblem& prob);
double block_norm(const Block& blk, const std::vector<double>& x);
double objective(const CoverProblem& prob, const std::vector<double>& x);
// Lower bound on min F from multipliers lambda >= 0 (scaled into the dual domain when needed).
double dual_bound(const CoverProblem& prob, const std::vector<double>& lambda);
void repair(const CoverProblem& prob, std::vector<double>& x);
double max_violation(const CoverProblem& prob, const std::vector<double>& x);

CoverSolution solve_cover(const CoverProblem& prob, const SolverOptions& opts, const std::vector<double>* warm_x = nullptr,
                          const std::vector<double>* warm_lambda = nullptr);

// Luxemburg norm of the block norms, inf{t : sum_B w_B (N_B / t)^{p_B} <= 1}.
double block_luxemburg(const CoverProblem& prob, const std::vector<double>& x, double tol);

struct NormSearch {
  std::vector<double> x;
  std::vector<double> lambda;
  double upper = 0.0;  // Luxemburg norm of the returned feasible x
  double lower = 0.0;  // certified lower bound (0 when unavailable)
  bool converged = false;
  bool heuristic = false;
  int solves = 0;
  int iterations = 0;
  double violation = 0.0;
};

// Minimises the block Luxemburg norm over the constraint set. Block scales t_B are overwritten.
NormSearch minimize_block_norm(CoverProblem prob, const SolverOptions& opts, double tol);

}  // namespace varsob::detail
