#pragma once

#include "mixlap/params.hpp"

namespace mixlap {

/// Splits the X-energy ||u||_X^p into the gradient term and the Gagliardo
/// term (including the exterior-tail contribution).
struct EnergyBreakdown {
  double local = 0.0;
  double nonlocal = 0.0;
  double total = 0.0;
};

/// A functional on grid functions, acting by f(phi) = h * sum_i c_i * phi_i.
/// Stores density coefficients, so values are resolution independent.
struct DualVector {
  Grid grid;
  std::vector<double> coefficients;
};

/// |t|^p with pow_abs(0, p) = 0.
double pow_abs(double t, double p);

/// |t|^{p-2} t with signed_power(0, p) = 0 (also for p < 2).
double signed_power(double t, double p);

/// (t^2 + eps^2)^{(p-2)/2} t, the smoothed kernel used inside gradients for
/// 1 < p < 2. Coincides with signed_power when eps = 0.
double signed_power_smoothed(double t, double p, double eps);

/// Midpoint-rule L^q norm (h * sum |u_i|^q)^{1/q}; requires q > 1.
double lq_norm(const GridFunction& u, double q);

/// h * sum_{i=0..M} |(u_{i+1} - u_i)/h|^p with zero boundary values.
double local_energy(const GridFunction& u, const Params& params);

/// h^2 * sum_{i != j} |u_i - u_j|^p / |x_i - x_j|^{1+ps}
///   + 2h * sum_i |u_i|^p * T(x_i).
double nonlocal_energy(const GridFunction& u, const Params& params);

/// Both terms, honoring the with_local / with_nonlocal toggles.
EnergyBreakdown x_energy(const GridFunction& u, const Params& params);

/// The pairing <Av, w>: nonlinear in v, linear in w; pair_A(v, v) equals
/// x_energy(v).total.
double pair_A(const GridFunction& v, const GridFunction& w, const Params& params);

/// The unique DualVector g with h * g_i = pair_A(v, e_i) for every basis
/// function e_i; equals the gradient of (1/p) * x_energy.
DualVector grad_A(const GridFunction& v, const Params& params);

/// grad_A with signed powers replaced by their eps-smoothed counterparts.
DualVector grad_A_smoothed(const GridFunction& v, const Params& params, double eps);

/// x_energy total with |t|^p replaced by (t^2 + eps^2)^{p/2}; the gradient of
/// (1/p) times this is exactly grad_A_smoothed.
double x_energy_smoothed(const GridFunction& u, const Params& params, double eps);

/// <B(v), w> = h * sum_i |v_i|^{q-2} v_i w_i.
double pair_B(const GridFunction& v, const GridFunction& w, const Params& params);

/// Density coefficients of B(w), i.e. c_i = |w_i|^{q-2} w_i.
DualVector b_functional(const GridFunction& w, const Params& params);

/// f(u) = h * sum_i c_i u_i.
double apply(const DualVector& f, const GridFunction& u);

}  // namespace mixlap
