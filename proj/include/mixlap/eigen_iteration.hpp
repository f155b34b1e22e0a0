#pragma once

#include <stdexcept>
#include <vector>

#include "mixlap/params.hpp"

namespace mixlap {

/// Per-step record of the inverse iteration: mu_n, ||w_{n+1}||_X^p, the
/// L^q norms of the normalized iterates (all 1 by construction) and the
/// inner-solver iteration counts.
struct IterationTrace {
  std::vector<double> mu;
  std::vector<double> x_energy_next;
  std::vector<double> lq_norms;
  std::vector<int> inner_iterations;
};

struct EigenPair {
  double lambda = 0.0;
  GridFunction w;
  double residual = 0.0;
  IterationTrace trace;
};

class ZeroIterate : public std::runtime_error {
 public:
  ZeroIterate() : std::runtime_error("eigen iteration: inner solve returned zero iterate") {}
};

class OuterMaxIterationsExceeded : public std::runtime_error {
 public:
  explicit OuterMaxIterationsExceeded(EigenPair best_pair)
      : std::runtime_error("eigen iteration: outer iteration budget exhausted"),
        best(std::move(best_pair)) {}

  EigenPair best;
};

/// Inverse iteration: v_{n+1} solves the operator equation with right-hand
/// side B(w_n), mu_n = ||v_{n+1}||_q^{-(p-1)}, w_{n+1} = v_{n+1}/||v_{n+1}||_q.
/// Stops when |mu_n - ||w_{n+1}||_X^p| <= tol * mu_n and the weak-formulation
/// residual of the resulting pair is at most tol.
EigenPair inverse_iteration(const Params& params, const Grid& grid, const GridFunction& w0,
                            double tol, int max_outer);

/// max_i |pair_A(u, e_i) - lambda * ||u||_q^{p-q} * pair_B(u, e_i)| / h.
double eigen_residual(double lambda, const GridFunction& u, const Params& params);

/// x_energy(u).total / lq_norm(u, q)^p; throws on u == 0.
double rayleigh_quotient(const GridFunction& u, const Params& params);

/// Positive tent profile, the default starting iterate.
GridFunction default_start(const Grid& grid);

}  // namespace mixlap
