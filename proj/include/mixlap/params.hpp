#pragma once

#include <string>
#include <vector>

namespace mixlap {

/// Exponent triple (p, q, s) plus spatial dimension, validated against the
/// admissible range 1 < p, 0 < s < 1, 1 < q < p*.
///
/// The with_local / with_nonlocal toggles are test-harness switches that
/// disable one of the two energy terms; the default is the full sum.
struct Params {
  double p = 2.0;
  double q = 2.0;
  double s = 0.5;
  int dim = 1;
  double p_star = 0.0;  // critical exponent; +inf when p >= dim
  bool with_local = true;
  bool with_nonlocal = true;
};

/// Np/(N-p) for p < N, +inf otherwise.
double critical_exponent(double p, int dim);

/// Validates (p, q, s, N) and returns a Params record carrying p*.
/// Throws std::invalid_argument naming the violated inequality.
Params validate_params(double p, double q, double s, int dim = 1);

/// Uniform interior mesh on the open interval (a, b) with M interior nodes,
/// spacing h = (b - a)/(M + 1). Functions vanish at a, b and outside (a, b).
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int nodes = 0;  // interior node count M
  double h = 0.0;

  double coord(int i) const { return a + (i + 1) * h; }  // i in [0, nodes)
  bool operator==(const Grid&) const = default;
};

Grid build_grid(double a, double b, int nodes);

/// Real values at the interior nodes; implicitly zero outside (a, b).
struct GridFunction {
  Grid grid;
  std::vector<double> values;
};

GridFunction zero_function(const Grid& grid);

/// Throws if the value vector length mismatches the grid or holds NaN/inf.
void check_grid_function(const GridFunction& u);

/// Exact exterior-tail weight of the nonlocal kernel at an interior point x:
///   T(x) = (1/(ps)) * [ (x-a)^{-ps} + (b-x)^{-ps} ].
/// Throws if x is not strictly inside (a, b).
double tail_weight(double x, const Grid& grid, const Params& params);

}  // namespace mixlap
