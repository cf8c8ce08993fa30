#pragma once

// Modified Bessel functions of integer order and finite continued fractions.
//
// I-families are produced by Miller's backward recurrence normalized with
// the generating identity e^z = I_0(z) + 2 sum_{k>=1} I_k(z). Values are
// carried in exponentially scaled form I_nu(z) e^{-Re z} so that arguments
// far beyond the double range of e^{Re z} remain usable through ratios.
// Only Re z >= 0 is supported.

#include <complex>
#include <span>
#include <vector>

namespace ulab::bessel {

using cplx = std::complex<double>;

struct BesselArg {
  cplx z;
  int nu_max = 0;
};

/// Order at which the backward recurrence is started for argument z when
/// orders up to nu_max are requested.
int miller_start_order(cplx z, int nu_max);

/// I_nu(z) e^{-Re z} for nu = 0..nu_max.
std::vector<cplx> i_family_scaled(cplx z, int nu_max);

/// I_nu(z) for nu = 0..nu_max. Throws Overflow when e^{Re z} is not
/// representable; callers then need i_family_scaled or i_ratios.
std::vector<cplx> i_family(const BesselArg& arg);

/// I_nu(z) / I_0(z) for nu = 0..nu_max, finite for any |z| (z != 0).
std::vector<cplx> i_ratios(cplx z, int nu_max);

struct Ratio {
  cplx value;
  // Set when z = 0 and nu > 0: the ratio is 0/0 and value holds its limit 0.
  bool limit = false;
};

/// I_nu(z) / I_0(z).
Ratio i_ratio(int nu, cplx z);

/// K_nu(x) for nu = 0..nu_max, x > 0. K_0 and K_1 come from quadrature of
/// int_0^inf e^{-x cosh t} cosh(nu t) dt; higher orders from the upward
/// recurrence, which is stable for K.
std::vector<double> k_family(int nu_max, double x);

/// |sqrt(2 pi t) I_0(t) e^{-t} - 1|, the relative error of the leading
/// large-argument asymptotic of I_0.
double i0_asymptotic_gap(double t);

struct ContinuedFraction {
  std::vector<double> partial_quotients;  // a_0, ..., a_n
};

/// Result of evaluating [a_0; a_1, ..., a_n] = a_0 + 1/(a_1 + 1/(... + 1/a_n)).
/// p and q are the last convergent's numerator and denominator divided by
/// 2^scale_log2 (a common factor applied to keep them finite).
struct Convergent {
  double value = 0.0;
  double p = 0.0;
  double q = 1.0;
  int scale_log2 = 0;
};

/// Evaluates the fraction with the convergent recurrences
///   p_n = a_n p_{n-1} + p_{n-2},  q_n = a_n q_{n-1} + q_{n-2}
/// seeded with p_{-1} = 1, q_{-1} = 0, p_0 = a_0, q_0 = 1.
/// Throws DegenerateFraction naming the first index with q_j == 0.
Convergent cf_eval(std::span<const double> partial_quotients);
inline Convergent cf_eval(const ContinuedFraction& cf) { return cf_eval(cf.partial_quotients); }

}  // namespace ulab::bessel
