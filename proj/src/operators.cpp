#include "mixlap/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mixlap {

double pow_abs(double t, double p) {
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

double signed_power(double t, double p) {
  if (t == 0.0) return 0.0;
  if (p == 2.0) return t;
  if (p == 3.0) return std::abs(t) * t;
  return std::pow(std::abs(t), p - 2.0) * t;
}

double signed_power_smoothed(double t, double p, double eps) {
  if (eps == 0.0 || p >= 2.0) return signed_power(t, p);
  return std::pow(t * t + eps * eps, 0.5 * (p - 2.0)) * t;
}

namespace {

struct KernelCache {
  std::vector<double> ring;  // ring[d] = (h*d)^{-(1+ps)}, d >= 1
  std::vector<double> tail;  // T(x_i)
};

KernelCache make_kernel(const Grid& g, const Params& prm) {
  KernelCache k;
  const double expo = 1.0 + prm.p * prm.s;
  k.ring.assign(static_cast<size_t>(g.nodes), 0.0);
  for (int d = 1; d < g.nodes; ++d) {
    k.ring[static_cast<size_t>(d)] = std::pow(g.h * d, -expo);
  }
  k.tail.resize(static_cast<size_t>(g.nodes));
  for (int i = 0; i < g.nodes; ++i) {
    k.tail[static_cast<size_t>(i)] = tail_weight(g.coord(i), g, prm);
  }
  return k;
}

void require_same_grid(const GridFunction& v, const GridFunction& w) {
  if (!(v.grid == w.grid)) throw std::invalid_argument("operators: grid mismatch");
}

}  // namespace

double lq_norm(const GridFunction& u, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("lq_norm: q must satisfy q > 1");
  check_grid_function(u);
  double sum = 0.0;
  for (double v : u.values) sum += pow_abs(v, q);
  return std::pow(u.grid.h * sum, 1.0 / q);
}

double local_energy(const GridFunction& u, const Params& params) {
  check_grid_function(u);
  const int m = u.grid.nodes;
  const double h = u.grid.h;
  double sum = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double next = (i < m) ? u.values[static_cast<size_t>(i)] : 0.0;
    sum += pow_abs((next - prev) / h, params.p);
    prev = next;
  }
  return h * sum;
}

double nonlocal_energy(const GridFunction& u, const Params& params) {
  check_grid_function(u);
  const int m = u.grid.nodes;
  const double h = u.grid.h;
  const KernelCache k = make_kernel(u.grid, params);
  double pairs = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ui = u.values[static_cast<size_t>(i)];
    for (int j = i + 1; j < m; ++j) {
      pairs += pow_abs(ui - u.values[static_cast<size_t>(j)], params.p) *
               k.ring[static_cast<size_t>(j - i)];
    }
  }
  double tail = 0.0;
  for (int i = 0; i < m; ++i) {
    tail += pow_abs(u.values[static_cast<size_t>(i)], params.p) * k.tail[static_cast<size_t>(i)];
  }
  return 2.0 * h * h * pairs + 2.0 * h * tail;
}

EnergyBreakdown x_energy(const GridFunction& u, const Params& params) {
  EnergyBreakdown e;
  e.local = params.with_local ? local_energy(u, params) : 0.0;
  e.nonlocal = params.with_nonlocal ? nonlocal_energy(u, params) : 0.0;
  e.total = e.local + e.nonlocal;
  return e;
}

double pair_A(const GridFunction& v, const GridFunction& w, const Params& params) {
  require_same_grid(v, w);
  check_grid_function(v);
  check_grid_function(w);
  const int m = v.grid.nodes;
  const double h = v.grid.h;
  const double p = params.p;
  double out = 0.0;
  if (params.with_local) {
    double local = 0.0;
    double pv = 0.0, pw = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double nv = (i < m) ? v.values[static_cast<size_t>(i)] : 0.0;
      const double nw = (i < m) ? w.values[static_cast<size_t>(i)] : 0.0;
      local += signed_power((nv - pv) / h, p) * ((nw - pw) / h);
      pv = nv;
      pw = nw;
    }
    out += h * local;
  }
  if (params.with_nonlocal) {
    const KernelCache k = make_kernel(v.grid, params);
    double pairs = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double dv = v.values[static_cast<size_t>(i)] - v.values[static_cast<size_t>(j)];
        const double dw = w.values[static_cast<size_t>(i)] - w.values[static_cast<size_t>(j)];
        pairs += signed_power(dv, p) * dw * k.ring[static_cast<size_t>(j - i)];
      }
    }
    double tail = 0.0;
    for (int i = 0; i < m; ++i) {
      tail += signed_power(v.values[static_cast<size_t>(i)], p) *
              w.values[static_cast<size_t>(i)] * k.tail[static_cast<size_t>(i)];
    }
    out += 2.0 * h * h * pairs + 2.0 * h * tail;
  }
  return out;
}

DualVector grad_A_smoothed(const GridFunction& v, const Params& params, double eps) {
  check_grid_function(v);
  const int m = v.grid.nodes;
  const double h = v.grid.h;
  const double p = params.p;
  std::vector<double> g(static_cast<size_t>(m), 0.0);
  if (params.with_local) {
    // h * g_i gets phi(d_{i-1}) - phi(d_i) with d_k the forward slope at x_k.
    std::vector<double> slope_pow(static_cast<size_t>(m + 1));
    double prev = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double next = (i < m) ? v.values[static_cast<size_t>(i)] : 0.0;
      slope_pow[static_cast<size_t>(i)] = signed_power_smoothed((next - prev) / h, p, eps);
      prev = next;
    }
    for (int i = 0; i < m; ++i) {
      g[static_cast<size_t>(i)] +=
          (slope_pow[static_cast<size_t>(i)] - slope_pow[static_cast<size_t>(i + 1)]) / h;
    }
  }
  if (params.with_nonlocal) {
    const KernelCache k = make_kernel(v.grid, params);
    for (int i = 0; i < m; ++i) {
      const double vi = v.values[static_cast<size_t>(i)];
      double acc = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        acc += signed_power_smoothed(vi - v.values[static_cast<size_t>(j)], p, eps) *
               k.ring[static_cast<size_t>(std::abs(i - j))];
      }
      g[static_cast<size_t>(i)] +=
          2.0 * h * acc +
          2.0 * signed_power_smoothed(vi, p, eps) * k.tail[static_cast<size_t>(i)];
    }
  }
  return DualVector{v.grid, std::move(g)};
}

DualVector grad_A(const GridFunction& v, const Params& params) {
  return grad_A_smoothed(v, params, 0.0);
}

double x_energy_smoothed(const GridFunction& u, const Params& params, double eps) {
  if (eps == 0.0) return x_energy(u, params).total;
  check_grid_function(u);
  const int m = u.grid.nodes;
  const double h = u.grid.h;
  const double p = params.p;
  auto pe = [&](double t) { return std::pow(t * t + eps * eps, 0.5 * p); };
  double out = 0.0;
  if (params.with_local) {
    double sum = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double next = (i < m) ? u.values[static_cast<size_t>(i)] : 0.0;
      sum += pe((next - prev) / h);
      prev = next;
    }
    out += h * sum;
  }
  if (params.with_nonlocal) {
    const KernelCache k = make_kernel(u.grid, params);
    double pairs = 0.0;
    for (int i = 0; i < m; ++i) {
      const double ui = u.values[static_cast<size_t>(i)];
      for (int j = i + 1; j < m; ++j) {
        pairs += pe(ui - u.values[static_cast<size_t>(j)]) * k.ring[static_cast<size_t>(j - i)];
      }
    }
    double tail = 0.0;
    for (int i = 0; i < m; ++i) {
      tail += pe(u.values[static_cast<size_t>(i)]) * k.tail[static_cast<size_t>(i)];
    }
    out += 2.0 * h * h * pairs + 2.0 * h * tail;
  }
  return out;
}

double pair_B(const GridFunction& v, const GridFunction& w, const Params& params) {
  require_same_grid(v, w);
  check_grid_function(v);
  check_grid_function(w);
  double sum = 0.0;
  for (size_t i = 0; i < v.values.size(); ++i) {
    sum += signed_power(v.values[i], params.q) * w.values[i];
  }
  return v.grid.h * sum;
}

DualVector b_functional(const GridFunction& w, const Params& params) {
  check_grid_function(w);
  std::vector<double> c(w.values.size());
  for (size_t i = 0; i < w.values.size(); ++i) c[i] = signed_power(w.values[i], params.q);
  return DualVector{w.grid, std::move(c)};
}

double apply(const DualVector& f, const GridFunction& u) {
  if (!(f.grid == u.grid)) throw std::invalid_argument("apply: grid mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < f.coefficients.size(); ++i) sum += f.coefficients[i] * u.values[i];
  return f.grid.h * sum;
}

}  // namespace mixlap
