#pragma once

// Exact evolutions on the infinite lattice: the discrete Schrodinger
// equation d_t u = i Delta_d u, its gamma-shifted relatives, and the coupled
// first-order system d_t u = i (v_{k+1}-v_{k-1})/2h, d_t v = -i (u_{k+1}-u_{k-1})/2h.
// Virial traces, parabola fits and the intertwining identity are built on them.
//
// Evolved sequences are returned on a box grown by the kernel spread, so the
// mass beyond the box is below rounding.

#include <functional>
#include <utility>
#include <vector>

#include "ulab/lattice.hpp"
#include "ulab/minimizer.hpp"

namespace ulab {

/// Sites the Schrodinger kernel I_m(2it/h^2) reaches at time t.
int schrodinger_margin(double t, double h);
/// Sites the coupled-system kernel J_m(t/h) reaches at time t.
int coupled_margin(double t, double h);

/// e^{it Delta_d} u0 by Fourier multiplier exp(-4it sum_j sin^2(theta_j/2)/h^2)
/// on a zero-padded grid, returned on radius N + schrodinger_margin (or R).
LatticeSeq evolve_schrodinger(const LatticeSeq& u0, double t);
LatticeSeq evolve_schrodinger(const LatticeSeq& u0, double t, int R);

/// Same evolution as the Bessel convolution
/// u_k(t) = e^{-2dit/h^2} sum_m u0_m prod_l I_{k_l - m_l}(2it/h^2).
LatticeSeq evolve_schrodinger_kernel(const LatticeSeq& u0, double t);
LatticeSeq evolve_schrodinger_kernel(const LatticeSeq& u0, double t, int R);

/// Solution of d_t u = i sum_j (u_{k+e_j} + gamma u_k + u_{k-e_j}) / h^2.
LatticeSeq gamma_family_evolve(const LatticeSeq& u0, double gamma, double t);

/// Closed-form evolution of the main minimizer,
/// e^{-2dit/h^2} C prod_j I_{k_j}((1 + 2 alpha i t)/(alpha h^2)) with C as in
/// minimizer_main for spec.norm, on the box of radius R.
LatticeSeq minimizer_evolution(const MinimizerSpec& spec, double t, int R);
/// Radius beyond which the evolved minimizer is below 1e-17 relative.
int minimizer_evolution_radius(const MinimizerSpec& spec, double t);

/// Real weight phi_k = phi_1(k_1) + ... + phi_d(k_d).
struct PhiWeight {
  std::vector<std::function<double(long)>> axis;

  int dim() const noexcept { return static_cast<int>(axis.size()); }
  double operator()(const Index& k) const;

  /// phi_k = |k h|^2.
  static PhiWeight quadratic(int d, double h);
  static PhiWeight constant(int d, double c);
  /// From values on [-N, N]^d in row-major order. Throws UnsupportedWeight
  /// unless the table is a sum of one-axis functions (to 1e-12 relative).
  /// Outside the box each axis function is extended by its edge value.
  static PhiWeight from_table(const std::vector<double>& values, int d, int N);
};

/// F = h^d sum phi_k |u_k|^2.
double weighted_mass(const LatticeSeq& u, const PhiWeight& phi);
/// dF/dt along the Schrodinger flow at state u:
/// -2 Im h^d sum_j sum_k (d_j^+ phi)_k u_k conj((d_j^+ u)_k).
double virial_first(const LatticeSeq& u, const PhiWeight& phi);
/// d^2F/dt^2 at state u:
/// 4 h^d sum_k sum_j (d_j^+ d_j^- phi)_k |(A_j u)_k|^2 - h^d sum_k (Delta_d^2 phi)_k |u_k|^2.
double virial_second(const LatticeSeq& u, const PhiWeight& phi);
/// virial_second at the state evolve_schrodinger(u0, t).
double virial_general(const LatticeSeq& u0, const PhiWeight& phi, double t);

struct VirialTrace {
  std::vector<double> times;  // centered times (dF/dt = 0 at time 0)
  std::vector<double> F, Fdot, Fddot, fit_residual;
  double a_fit = 0.0;
  double b_fit = 0.0;
  double curvature = 4.0;  // F = a + curvature * b * t^2
  double residual = 0.0;   // max |F - fit| over samples and nine extra points
  double third_derivative_max = 0.0;  // max |d/dt F''| by differencing the exact F''
  double time_shift = 0.0;  // original time of the centered origin
  double a_initial = 0.0;   // F at original time 0, where the normalization holds
  double scale = 1.0;       // factor applied to u0 by the normalization
  double norm_drift = 0.0;  // max | ||u(t)|| - ||u(0)|| |
  double hypothesis_residual = 0.0;  // coupled system only
};

inline double fit_product(const VirialTrace& tr) { return tr.a_fit * tr.b_fit; }
inline double initial_product(const VirialTrace& tr) { return tr.a_initial * tr.b_fit; }

/// Schrodinger trace for phi = |kh|^2. u0 is rescaled so that the
/// normalization quantity has modulus 2, and time is shifted so that
/// dF/dt = 0 at 0. The fit a + beta t + gamma t^2 is solved exactly at
/// t in {0, T/2, T}, T = max|times|; b_fit = gamma / 4.
VirialTrace virial_trace_schrodinger(const LatticeSeq& u0, const std::vector<double>& times);

enum class CoupledVariant { Conjugate, Alternating };

/// v = conj(u) or v_k = (-1)^{k+1} u_k.
LatticeSeq coupled_partner(const LatticeSeq& u, CoupledVariant variant);

/// Exact solution of the coupled system (d = 1).
std::pair<LatticeSeq, LatticeSeq> evolve_coupled(const LatticeSeq& u0, const LatticeSeq& v0, double t);
std::pair<LatticeSeq, LatticeSeq> evolve_coupled(const LatticeSeq& u0, const LatticeSeq& v0, double t, int R);

/// Coupled trace with v0 given by the variant, after scaling u0 so that
/// |h^2 sum (u_{k+1}-u_{k-1})/2 conj(u_k)| = 2; F = h sum k^2 h^2 |u|^2,
/// fit a + b t^2 on centered times. The normalization quantity is not
/// conserved by this flow, so a_fit * b_fit may fall below 1; the bound
/// holds for a_initial * b_fit. hypothesis_residual is the largest violation of
/// |u_k|^2 = |v_k|^2 and Re u_{k+1} conj(u_{k-1}) = Re v_{k+1} conj(v_{k-1}).
VirialTrace virial_trace_coupled(const LatticeSeq& u0, CoupledVariant variant, const std::vector<double>& times);

/// max_k |u'(t) - i (v_{k+1}-v_{k-1})/2h| and the same for v, with u' by
/// centered differences of step delta, relative to max |u|, |v|.
double coupled_ode_residual(const LatticeSeq& u0, const LatticeSeq& v0, double t, double delta = 1e-4);
/// max_k |u''(t) - (u_{k+2} - 2u_k + u_{k-2})/(4h^2)| relative to max |u|,
/// for the variant's partner, with u'' by centered differences.
double coupled_wave_residual(const LatticeSeq& u0, CoupledVariant variant, double t, double delta = 1e-3);

struct IntertwineResult {
  double residual1 = 0.0;  // ||(A + alpha Lambda(t)) w(t)|| / ||w(t)||
  double residual2 = 0.0;  // ||Lambda(t) e^{it Delta} u0 - e^{it Delta}(kh u0)|| / ||kh u0||
};

/// Lambda(t) u = k h u + 2 i t A u, checked on the evolved minimizer of spec
/// and on e^{it Delta} u0. u0 must share d and h with `spec`.
IntertwineResult intertwine_check(const MinimizerSpec& spec, const LatticeSeq& u0, double t);

}  // namespace ulab
