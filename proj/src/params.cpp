#include "mixlap/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixlap {

double critical_exponent(double p, int dim) {
  if (p >= static_cast<double>(dim)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(dim) * p / (static_cast<double>(dim) - p);
}

Params validate_params(double p, double q, double s, int dim) {
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(s)) {
    throw std::invalid_argument("params: p, q, s must be finite");
  }
  if (dim < 1) {
    throw std::invalid_argument("params: dimension N must satisfy N >= 1");
  }
  if (!(p > 1.0)) {
    throw std::invalid_argument("params: exponent p must satisfy p > 1");
  }
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("params: fractional order s must satisfy 0 < s < 1");
  }
  if (!(q > 1.0)) {
    throw std::invalid_argument("params: exponent q must satisfy q > 1");
  }
  const double p_star = critical_exponent(p, dim);
  if (!(q < p_star)) {
    throw std::invalid_argument("params: q must satisfy q < p* = Np/(N-p), got q >= p*");
  }
  Params out;
  out.p = p;
  out.q = q;
  out.s = s;
  out.dim = dim;
  out.p_star = p_star;
  return out;
}

Grid build_grid(double a, double b, int nodes) {
  if (!(a < b)) throw std::invalid_argument("grid: left endpoint must satisfy a < b");
  if (nodes < 2) throw std::invalid_argument("grid: interior node count must satisfy M >= 2");
  Grid g;
  g.a = a;
  g.b = b;
  g.nodes = nodes;
  g.h = (b - a) / static_cast<double>(nodes + 1);
  return g;
}

GridFunction zero_function(const Grid& grid) {
  return GridFunction{grid, std::vector<double>(static_cast<size_t>(grid.nodes), 0.0)};
}

void check_grid_function(const GridFunction& u) {
  if (static_cast<int>(u.values.size()) != u.grid.nodes) {
    throw std::invalid_argument("grid function: value count differs from interior node count");
  }
  for (double v : u.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid function: non-finite entry");
  }
}

double tail_weight(double x, const Grid& grid, const Params& params) {
  if (!(x > grid.a && x < grid.b)) {
    throw std::invalid_argument("tail_weight: x must lie strictly inside (a, b)");
  }
  const double ps = params.p * params.s;
  return (std::pow(x - grid.a, -ps) + std::pow(grid.b - x, -ps)) / ps;
}

}  // namespace mixlap
