#pragma once

#include <string>
#include <vector>

#include "mixlap/params.hpp"

namespace mixlap {

enum class OracleMethod { dense_p2, projected_gradient, coordinate_search };

std::string to_string(OracleMethod m);

struct OracleResult {
  double lambda = 0.0;
  GridFunction minimizer;
  OracleMethod method = OracleMethod::dense_p2;
  bool multimodal = false;  // coordinate search only: starts disagreed
};

/// Symmetric matrix K of the quadratic form x_energy at p = 2, assembled
/// directly from the closed-form entries (independent of the operators
/// module), so that pair_A(v, w) = w^T K v and the eigenproblem reads
/// K v = lambda h v.
std::vector<std::vector<double>> assemble_p2_matrix(const Grid& grid, const Params& params);

/// Cyclic Jacobi rotations on a symmetric matrix. Returns the eigenvalues in
/// ascending order; if vecs is non-null it receives the matching
/// eigenvectors as rows.
std::vector<double> jacobi_eigen(std::vector<std::vector<double>> a,
                                 std::vector<std::vector<double>>* vecs = nullptr);

/// Dense LU solve, used as the linear oracle for the inner solver at p = 2.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> rhs);

/// Smallest eigenpair of the pencil (K, h I) at p = q = 2 via Jacobi
/// rotations. Throws unless p = 2 and q = 2.
OracleResult dense_p2_eigen(const Grid& grid, const Params& params);

/// Gradient descent on the Rayleigh quotient with L^q renormalization after
/// each step; best result over the given number of restarts.
OracleResult projected_gradient_min(const Params& params, const Grid& grid, int restarts,
                                    double stat_tol = 1e-8, int max_iter = 400000);

/// Multi-start cyclic coordinate minimization of the Rayleigh quotient;
/// desk-scale exhaustive certification for M <= 6 nodes.
OracleResult coordinate_search_min(const Params& params, const Grid& grid, int starts = 10);

}  // namespace mixlap
