#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mixlap/operators.hpp"
#include "mixlap/params.hpp"

namespace mixlap {

struct SolveReport {
  GridFunction solution;
  int iterations = 0;
  double final_gradient_norm = 0.0;  // scaled sup-norm of the operator-equation residual
  double objective = 0.0;
  std::vector<double> objective_trace;  // objective at each accepted iterate
};

class MaxIterationsExceeded : public std::runtime_error {
 public:
  MaxIterationsExceeded(GridFunction best_iterate, double residual, int iterations)
      : std::runtime_error("inner solver: iteration budget exhausted"),
        best(std::move(best_iterate)),
        residual(residual),
        iterations(iterations) {}

  GridFunction best;
  double residual;
  int iterations;
};

/// Solves <A(u), v> = <f, v> for all v by minimizing the strictly convex
/// energy Phi(u) = (1/p) ||u||_X^p - f(u) with backtracking gradient descent.
/// Success means max_i |pair_A(u, e_i) - f(e_i)| / h <= tol.
SolveReport solve_operator_equation(const DualVector& f, const Params& params, double tol,
                                    int max_iter = 50000,
                                    const std::optional<GridFunction>& warm_start = std::nullopt);

}  // namespace mixlap
