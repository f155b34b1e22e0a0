#include "mixlap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mixlap/operators.hpp"

namespace mixlap {

double linf_norm(const GridFunction& u) {
  check_grid_function(u);
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> default_thresholds(const GridFunction& u) {
  const double sup = linf_norm(u);
  const int count = 32;
  std::vector<double> ks(count);
  if (sup == 0.0) {
    for (int i = 0; i < count; ++i) ks[i] = static_cast<double>(i);
    return ks;
  }
  const double lo = 0.01 * sup;
  const double hi = 1.05 * sup;
  const double ratio = std::pow(hi / lo, 1.0 / (count - 1));
  double k = lo;
  for (int i = 0; i < count; ++i) {
    ks[i] = k;
    k *= ratio;
  }
  return ks;
}

LevelSetReport level_set_report(const GridFunction& u, const std::vector<double>& thresholds) {
  check_grid_function(u);
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] < 0.0) throw std::invalid_argument("level_set_report: thresholds must be >= 0");
    if (i > 0 && thresholds[i] < thresholds[i - 1]) {
      throw std::invalid_argument("level_set_report: thresholds must be sorted ascending");
    }
  }
  const double h = u.grid.h;
  LevelSetReport rep;
  rep.thresholds = thresholds;
  rep.measures.reserve(thresholds.size());
  rep.excess_integrals.reserve(thresholds.size());
  for (double k : thresholds) {
    int count = 0;
    double excess = 0.0;
    for (double v : u.values) {
      if (v > k) {
        ++count;
        excess += v - k;
      }
    }
    rep.measures.push_back(h * count);
    rep.excess_integrals.push_back(h * excess);
  }

  // Least-squares fit of log(excess/k) against log(measure).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0.0 || rep.measures[i] <= 0.0 || rep.excess_integrals[i] <= 0.0) continue;
    const double x = std::log(rep.measures[i]);
    const double y = std::log(rep.excess_integrals[i] / thresholds[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double det = n * sxx - sx * sx;
  if (n >= 3 && std::abs(det) > 1e-12 * (1.0 + sxx * n)) {
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    rep.fitted_beta = slope - 1.0;
    rep.fitted_constant = std::exp(intercept);
    rep.fit_valid = true;
  }
  return rep;
}

double positivity_check(const GridFunction& u, double lo, double hi) {
  check_grid_function(u);
  if (!(u.grid.a < lo && lo < hi && hi < u.grid.b)) {
    throw std::invalid_argument("positivity_check: sub-interval must be compactly contained");
  }
  bool seen = false;
  double m = 0.0;
  for (int i = 0; i < u.grid.nodes; ++i) {
    const double x = u.grid.coord(i);
    if (x < lo || x > hi) continue;
    const double v = u.values[static_cast<size_t>(i)];
    m = seen ? std::min(m, v) : v;
    seen = true;
  }
  if (!seen) throw std::invalid_argument("positivity_check: no grid nodes in sub-interval");
  return m;
}

GridFunction random_smooth_function(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  constexpr int modes = 8;
  double coeff[modes];
  for (double& c : coeff) c = dist(rng);
  GridFunction u = zero_function(grid);
  const double len = grid.b - grid.a;
  for (int i = 0; i < grid.nodes; ++i) {
    const double t = (grid.coord(i) - grid.a) / len;
    double v = 0.0;
    for (int k = 0; k < modes; ++k) v += coeff[k] * std::sin((k + 1) * std::numbers::pi * t);
    u.values[static_cast<size_t>(i)] = v;
  }
  return u;
}

InequalityReport inequality_report(int corpus_size, std::uint64_t seed, const Params& params,
                                   const Grid& grid) {
  if (corpus_size < 100) {
    throw std::invalid_argument("inequality_report: corpus size must be >= 100");
  }
  InequalityReport rep;
  rep.corpus_size = corpus_size;
  rep.seed = seed;
  rep.embedding_exponent_r = params.q;

  std::mt19937_64 rng(seed);
  for (int n = 0; n < corpus_size; ++n) {
    GridFunction u = random_smooth_function(grid, rng);
    if (linf_norm(u) < 1e-12) continue;  // ratio undefined for the zero function
    const double loc = local_energy(u, params);
    const double nl = nonlocal_energy(u, params);
    rep.seminorm_max_ratio = std::max(rep.seminorm_max_ratio, nl / loc);
    rep.embedding_max_ratio =
        std::max(rep.embedding_max_ratio, lq_norm(u, params.q) / std::pow(loc, 1.0 / params.p));
  }

  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  bool first = true;
  for (int n = 0; n < corpus_size; ++n) {
    const double a = dist(rng);
    const double b = dist(rng);
    if (a == b) continue;
    const double num = (signed_power(a, params.p) - signed_power(b, params.p)) * (a - b);
    const double den = std::pow(std::abs(a) + std::abs(b), params.p - 2.0) * ((a - b) * (a - b));
    const double ratio = num / den;
    if (first || ratio < rep.algineq_min_ratio) {
      rep.algineq_min_ratio = ratio;
      first = false;
    }
  }
  return rep;
}

}  // namespace mixlap
