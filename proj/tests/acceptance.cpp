// End-to-end acceptance battery. Each numbered check prints exactly one
// PASS/FAIL line; the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mixlap/cli.hpp"
#include "mixlap/diagnostics.hpp"
#include "mixlap/eigen_iteration.hpp"
#include "mixlap/operators.hpp"
#include "mixlap/oracles.hpp"
#include "mixlap/params.hpp"

using namespace mixlap;

namespace {

int failures = 0;

void report(int number, const std::string& label, bool pass, const std::string& detail = "") {
  std::printf("%s  criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number, label.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct ParamSet {
  double p, q;
};

const std::vector<ParamSet> lattice() {
  std::vector<ParamSet> sets;
  for (double p : {1.5, 2.0, 3.0})
    for (double q : {1.5, 2.0, 2.5}) sets.push_back({p, q});
  return sets;
}

// Re-runs the iteration with tightening tolerance until the terminal gap
// |mu_n - ||w||_X^p| meets an absolute target, warm-starting each retry.
EigenPair run_to_abs_gap(const Params& prm, const Grid& grid, double target) {
  double tol = target;
  GridFunction start = default_start(grid);
  EigenPair pair;
  for (int attempt = 0; attempt < 5; ++attempt) {
    pair = inverse_iteration(prm, grid, start, tol, 600);
    const double gap = std::abs(pair.trace.mu.back() - pair.trace.x_energy_next.back());
    if (gap <= target) return pair;
    tol *= 0.1;
    start = pair.w;
  }
  return pair;
}

void align_to(const GridFunction& ref, GridFunction& u) {
  double dot = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i) dot += ref.values[i] * u.values[i];
  if (dot < 0.0)
    for (double& v : u.values) v = -v;
}

}  // namespace

int main() {
  const double tol = 1e-7;

  // --- 1: quadratic cross-check against the dense oracle, with a runtime cap
  {
    const Grid g = build_grid(0.0, 1.0, 100);
    const Params prm = validate_params(2.0, 2.0, 0.5);
    const auto t0 = std::chrono::steady_clock::now();
    const EigenPair pair = inverse_iteration(prm, g, default_start(g), 1e-10, 400);
    const OracleResult oracle = dense_p2_eigen(g, prm);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double rel = std::abs(pair.lambda - oracle.lambda) / oracle.lambda;
    report(1, "p=q=2 eigenvalue matches dense oracle at M=100", rel <= 1e-8 && secs <= 30.0,
           "rel err " + num(rel) + ", " + num(secs) + " s");
  }

  // --- 2: local-only closed form at M=200
  {
    const Grid g = build_grid(0.0, 1.0, 200);
    Params prm = validate_params(2.0, 2.0, 0.5);
    prm.with_nonlocal = false;
    const EigenPair pair = inverse_iteration(prm, g, default_start(g), 1e-10, 400);
    const double exact = 2.0 / (g.h * g.h) * (1.0 - std::cos(M_PI * g.h));
    const double rel = std::abs(pair.lambda - exact) / exact;
    const double vs_pi2 = std::abs(pair.lambda - M_PI * M_PI) / (M_PI * M_PI);
    report(2, "local-only eigenvalue matches (2/h^2)(1-cos(pi h))", rel <= 1e-8 && vs_pi2 <= 0.01,
           "rel err " + num(rel) + ", vs pi^2 " + num(vs_pi2));
  }

  // Shared runs over the 9-set exponent lattice.
  const Grid g100 = build_grid(0.0, 1.0, 100);
  const Grid g50 = build_grid(0.0, 1.0, 50);
  std::vector<EigenPair> pairs100;
  std::vector<Params> prms;
  for (const ParamSet& ps : lattice()) {
    const Params prm = validate_params(ps.p, ps.q, 0.5);
    prms.push_back(prm);
    pairs100.push_back(run_to_abs_gap(prm, g100, tol));
  }

  // --- 3: trace invariants on the 9 sets
  {
    bool ok = true;
    std::string worst;
    for (size_t k = 0; k < pairs100.size(); ++k) {
      const auto& tr = pairs100[k].trace;
      const double slack = 1e-10 * tr.mu.front();
      for (size_t n = 0; n + 1 < tr.mu.size(); ++n) {
        if (tr.mu[n + 1] > tr.mu[n] + slack) ok = false;
      }
      for (size_t n = 0; n < tr.mu.size(); ++n) {
        if (tr.x_energy_next[n] > tr.mu[n] + slack) ok = false;
      }
      const double gap = std::abs(tr.mu.back() - tr.x_energy_next.back());
      if (gap > tol) {
        ok = false;
        worst = "gap " + num(gap) + " at p=" + num(prms[k].p) + " q=" + num(prms[k].q);
      }
    }
    report(3, "mu trace nonincreasing, energy wedged, terminal gap <= 1e-7 (9 sets)", ok, worst);
  }

  // --- 4: every mu_n dominates the variational minimum (9 sets)
  std::vector<OracleResult> pg100;
  {
    bool ok = true;
    std::string worst;
    for (size_t k = 0; k < pairs100.size(); ++k) {
      pg100.push_back(projected_gradient_min(prms[k], g100, 2));
      const double floor_val = pg100.back().lambda - 10 * tol;
      for (double mu : pairs100[k].trace.mu) {
        if (mu < floor_val) {
          ok = false;
          worst = "mu " + num(mu) + " < " + num(floor_val) + " at p=" + num(prms[k].p) +
                  " q=" + num(prms[k].q);
        }
      }
    }
    report(4, "all mu_n >= variational minimum - 10 tol (9 sets)", ok, worst);
  }

  // --- 5: iteration and variational oracle agree at M=50 (9 sets)
  {
    bool ok = true;
    std::string worst;
    for (size_t k = 0; k < prms.size(); ++k) {
      const EigenPair pair = inverse_iteration(prms[k], g50, default_start(g50), 1e-9, 600);
      const OracleResult pg = projected_gradient_min(prms[k], g50, 2);
      const double rel = std::abs(pair.lambda - pg.lambda) / pg.lambda;
      GridFunction w = pair.w;
      GridFunction m = pg.minimizer;
      align_to(w, m);
      double sup = 0.0;
      for (size_t i = 0; i < w.values.size(); ++i) {
        sup = std::max(sup, std::abs(w.values[i] - m.values[i]));
      }
      if (rel > 1e-4 || sup > 1e-3) {
        ok = false;
        worst = "rel " + num(rel) + ", sup " + num(sup) + " at p=" + num(prms[k].p) +
                " q=" + num(prms[k].q);
      }
    }
    report(5, "iteration agrees with variational oracle at M=50 (9 sets)", ok, worst);
  }

  // --- 6: weak-formulation residual and its scaling law
  {
    bool ok = true;
    std::string worst;
    for (size_t k = 0; k < pairs100.size(); ++k) {
      const EigenPair& pair = pairs100[k];
      if (pair.residual > tol) ok = false;
      GridFunction scaled = pair.w;
      for (double& v : scaled.values) v *= 3.0;
      const double res3 = eigen_residual(pair.lambda, scaled, prms[k]);
      const double bound = std::pow(3.0, prms[k].p - 1.0) * tol * 1.0001;
      if (res3 > bound) {
        ok = false;
        worst = "scaled residual " + num(res3) + " > " + num(bound);
      }
    }
    report(6, "residual <= 1e-7 at termination; scaling by 3 obeys (p-1)-homogeneity", ok, worst);
  }

  // --- 7: pairing property suite, 1000 pairs per set
  {
    bool ok = true;
    std::string worst;
    for (const Params& prm : prms) {
      std::mt19937_64 rng(31415);
      std::uniform_real_distribution<double> dt(0.1, 3.0);
      for (int trial = 0; trial < 1000; ++trial) {
        GridFunction v = random_smooth_function(g50, rng);
        GridFunction w = random_smooth_function(g50, rng);
        const double ev = x_energy(v, prm).total;
        const double ew = x_energy(w, prm).total;
        const double scale = std::max(1.0, ev + ew);

        GridFunction diff = v;
        for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= w.values[i];
        if (pair_A(v, diff, prm) - pair_A(w, diff, prm) < -1e-12 * scale) {
          ok = false;
          worst = "monotonicity p=" + num(prm.p);
        }

        const double t = dt(rng);
        const double ha = pair_A(v, w, prm);
        const GridFunction tv = [&] {
          GridFunction x = v;
          for (double& y : x.values) y *= t;
          return x;
        }();
        const double lhs_a = pair_A(tv, w, prm);
        const double rhs_a = std::pow(t, prm.p - 1.0) * ha;
        // normalize by the natural magnitude of the pairing (its Hoelder
        // bound): the pairing itself can be small through cancellation while
        // the summed terms, and hence the rounding, are not
        const double scale_a = std::max(1.0, std::pow(t, prm.p - 1.0)) *
                               std::pow(ev, (prm.p - 1.0) / prm.p) * std::pow(ew, 1.0 / prm.p);
        if (std::abs(lhs_a - rhs_a) > 1e-12 * std::max(1.0, scale_a)) {
          ok = false;
          worst = "homogeneity A p=" + num(prm.p);
        }
        const double hb = pair_B(v, w, prm);
        const double lhs_b = pair_B(tv, w, prm);
        const double rhs_b = std::pow(t, prm.q - 1.0) * hb;
        if (std::abs(lhs_b - rhs_b) > 1e-12 * std::max(1.0, std::abs(rhs_b))) {
          ok = false;
          worst = "homogeneity B q=" + num(prm.q);
        }

        // Hoelder bounds, with equality on proportional pairs
        if (std::abs(ha) > std::pow(ev, (prm.p - 1.0) / prm.p) * std::pow(ew, 1.0 / prm.p) *
                               (1.0 + 1e-12)) {
          ok = false;
          worst = "Hoelder A p=" + num(prm.p);
        }
        const double nv = lq_norm(v, prm.q), nw = lq_norm(w, prm.q);
        if (std::abs(hb) > std::pow(nv, prm.q - 1.0) * nw * (1.0 + 1e-12)) {
          ok = false;
          worst = "Hoelder B q=" + num(prm.q);
        }
        if (trial % 100 == 0) {
          const double eq_a = pair_A(v, tv, prm);
          const double eq_bound = std::pow(ev, (prm.p - 1.0) / prm.p) *
                                  std::pow(x_energy(tv, prm).total, 1.0 / prm.p);
          if (std::abs(eq_a - eq_bound) > 1e-10 * eq_bound) {
            ok = false;
            worst = "Hoelder equality p=" + num(prm.p);
          }
          const double eq_b = pair_B(v, tv, prm);
          const double eq_b_bound = std::pow(nv, prm.q - 1.0) * lq_norm(tv, prm.q);
          if (std::abs(eq_b - eq_b_bound) > 1e-10 * eq_b_bound) {
            ok = false;
            worst = "Hoelder equality q=" + num(prm.q);
          }
        }
      }

      std::uniform_real_distribution<double> ds(-2.0, 2.0);
      for (int trial = 0; trial < 1000; ++trial) {
        const double a = ds(rng), b = ds(rng);
        if (a == b) continue;
        const double numr = (signed_power(a, prm.p) - signed_power(b, prm.p)) * (a - b);
        const double den = std::pow(std::abs(a) + std::abs(b), prm.p - 2.0) * (a - b) * (a - b);
        const double ratio = numr / den;
        if (ratio < 0.0) {
          ok = false;
          worst = "scalar ratio negative p=" + num(prm.p);
        }
        if (prm.p == 2.0 && std::abs(ratio - 1.0) > 1e-12) {
          ok = false;
          worst = "scalar ratio != 1 at p=2";
        }
      }
    }
    report(7, "pairing properties: monotonicity, homogeneity, Hoelder, scalar ratio", ok, worst);
  }

  // --- 8: gradient vs central finite differences, 100 random directions
  {
    bool ok = true;
    double worst = 0.0;
    const Grid g = build_grid(0.0, 1.0, 40);
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double pexp : {2.0, 3.0}) {
      const Params prm = validate_params(pexp, 2.0, 0.5);
      GridFunction v = random_smooth_function(g, rng);
      for (double& x : v.values) x += 2.0;  // stay away from |t|^{p-2} kinks
      const DualVector grad = grad_A(v, prm);
      for (int trial = 0; trial < 100; ++trial) {
        GridFunction d = zero_function(g);
        for (double& x : d.values) x = dist(rng);
        const double eps = 1e-6;
        GridFunction up = v, dn = v;
        for (int i = 0; i < g.nodes; ++i) {
          up.values[i] += eps * d.values[i];
          dn.values[i] -= eps * d.values[i];
        }
        const double fd =
            (x_energy(up, prm).total - x_energy(dn, prm).total) / (prm.p * 2.0 * eps);
        const double exact = apply(grad, d);
        const double rel = std::abs(fd - exact) / std::max(1e-10, std::abs(exact));
        worst = std::max(worst, rel);
        if (rel > 1e-5) ok = false;
      }
    }
    report(8, "gradient matches directional finite differences (p in {2,3})", ok,
           "worst rel " + num(worst));
  }

  // Refinement pair shared by criteria 9 and 10.
  const Grid g200 = build_grid(0.0, 1.0, 200);
  const Params p2 = validate_params(2.0, 2.0, 0.5);
  const EigenPair fine = inverse_iteration(p2, g200, default_start(g200), 1e-9, 400);
  const EigenPair& coarse = pairs100[4];  // p=2, q=2 entry of the lattice

  // --- 9: level-set structure and sup-norm stability
  {
    const LevelSetReport ls = level_set_report(coarse.w, default_thresholds(coarse.w));
    const double sup_c = linf_norm(coarse.w);
    const double sup_f = linf_norm(fine.w);
    bool empty_above = true;
    for (size_t i = 0; i < ls.thresholds.size(); ++i) {
      if (ls.thresholds[i] >= sup_c && ls.measures[i] != 0.0) empty_above = false;
    }
    const double drift = std::abs(sup_c - sup_f) / sup_f;
    const bool ok = empty_above && ls.fit_valid && ls.fitted_beta > 0.0 && drift <= 0.05;
    report(9, "level sets empty above sup, beta > 0, sup stable under refinement", ok,
           "beta " + num(ls.fitted_beta) + ", sup drift " + num(drift));
  }

  // --- 10: interior positivity and its stability
  {
    const double min_c = positivity_check(coarse.w, 0.25, 0.75);
    const double min_f = positivity_check(fine.w, 0.25, 0.75);
    const double drift = std::abs(min_c - min_f) / min_f;
    const bool ok = min_c > 0.0 && min_f > 0.0 && drift <= 0.05;
    report(10, "eigenfunction positive on the central half, stable under refinement", ok,
           "min " + num(min_c) + ", drift " + num(drift));
  }

  // --- 11: empirical inequality constants stable under refinement
  {
    const Params prm = validate_params(2.5, 2.0, 0.5);
    const InequalityReport a = inequality_report(200, 4242, prm, g100);
    const InequalityReport b = inequality_report(200, 4242, prm, g200);
    const double d1 = std::abs(a.seminorm_max_ratio - b.seminorm_max_ratio) / a.seminorm_max_ratio;
    const double d2 =
        std::abs(a.embedding_max_ratio - b.embedding_max_ratio) / a.embedding_max_ratio;
    const bool finite = std::isfinite(a.seminorm_max_ratio) && std::isfinite(a.embedding_max_ratio);
    const bool ok = finite && d1 <= 0.10 && d2 <= 0.10;
    report(11, "inequality constants finite, drift <= 10% between M=100 and M=200", ok,
           "drifts " + num(d1) + ", " + num(d2));
  }

  // --- 12: certify mode is byte-for-byte reproducible
  {
    const std::string path = "/tmp/mixlap_acceptance_certify.json";
    RunConfig cfg;
    cfg.mode = RunMode::certify;
    cfg.seed = 42;
    cfg.output_path = path;
    auto slurp = [&]() {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const int rc1 = run(cfg);
    const std::string first = slurp();
    const int rc2 = run(cfg);
    const std::string second = slurp();
    std::remove(path.c_str());
    const bool ok = rc1 == 0 && rc2 == 0 && !first.empty() && first == second;
    report(12, "certify output byte-identical across two runs with a fixed seed", ok);
  }

  if (failures == 0) {
    std::printf("all 12 acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
