#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mixlap/params.hpp"

namespace mixlap {

double linf_norm(const GridFunction& u);

/// Superlevel-set survey of a nonnegative profile: for each threshold k the
/// measure |{u > k}| and the excess integral over that set, plus a
/// least-squares fit of excess(k) ~ C * k * measure(k)^{1+beta}.
struct LevelSetReport {
  std::vector<double> thresholds;
  std::vector<double> measures;
  std::vector<double> excess_integrals;
  double fitted_constant = 0.0;
  double fitted_beta = 0.0;
  bool fit_valid = false;
};

LevelSetReport level_set_report(const GridFunction& u, const std::vector<double>& thresholds);

/// 32 geometrically spaced thresholds from 0.01 to 1.05 times the sup norm.
std::vector<double> default_thresholds(const GridFunction& u);

/// Minimum of u over the nodes inside [lo, hi]; the sub-interval must be
/// compactly contained in (a, b).
double positivity_check(const GridFunction& u, double lo, double hi);

/// Empirical constants for the core energy inequalities over a seeded random
/// corpus: max of nonlocal/local energy, max of ||u||_q / local^{1/p}, and
/// the sampled minimum of the p-monotonicity ratio
/// (phi_p(a)-phi_p(b))(a-b) / ((|a|+|b|)^{p-2}(a-b)^2).
struct InequalityReport {
  int corpus_size = 0;
  std::uint64_t seed = 0;
  double seminorm_max_ratio = 0.0;
  double embedding_max_ratio = 0.0;
  double embedding_exponent_r = 0.0;
  double algineq_min_ratio = 0.0;
};

InequalityReport inequality_report(int corpus_size, std::uint64_t seed, const Params& params,
                                   const Grid& grid);

/// Random truncated sine series (8 modes, coefficients uniform in [-1, 1]).
/// The coefficient draw does not depend on the grid resolution, so the same
/// seed yields discretizations of the same function on every grid.
GridFunction random_smooth_function(const Grid& grid, std::mt19937_64& rng);

}  // namespace mixlap
