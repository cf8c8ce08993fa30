#include "ulab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ulab/errors.hpp"
#include "ulab/quadrature.hpp"

namespace ulab::bessel {
namespace {

constexpr double kRescaleAbove = 0x1p+600;
constexpr double kRescaleBy = 0x1p-600;
// e^{Re z} must stay below DBL_MAX with room for the prefactor.
constexpr double kMaxUnscaledRe = 700.0;
constexpr double kMaxStartOrder = 2e7;  // about 320 MB of complex workspace

void validate(cplx z, int nu_max) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw InvalidArgument("bessel: argument is not finite");
  if (z.real() < 0.0)
    throw InvalidArgument("bessel: Re z < 0 is not supported (requires alpha > 0)");
  if (nu_max < 0) throw InvalidArgument("bessel: nu_max must be >= 0");
}

// Backward recurrence y_{k-1} = y_{k+1} + (2k/z) y_k from a start order far
// above nu_max. Returns y_0..y_nu_max proportional to I_0..I_nu_max and,
// if requested, the generating sum y_0 + 2 sum y_k over all computed orders
// with the same proportionality constant.
std::vector<cplx> backward_recurrence(cplx z, int nu_max, cplx* generating_sum) {
  const int start = miller_start_order(z, nu_max);
  std::vector<cplx> y(static_cast<std::size_t>(nu_max) + 1, cplx{0.0, 0.0});
  const cplx two_over_z = 2.0 / z;
  cplx above{0.0, 0.0};  // y_{k+1}
  cplx cur{1e-30, 0.0};  // y_k
  cplx sum{0.0, 0.0};
  for (int k = start; k >= 1; --k) {
    if (k <= nu_max) y[k] = cur;
    sum += 2.0 * cur;
    const cplx below = above + (two_over_z * static_cast<double>(k)) * cur;
    above = cur;
    cur = below;
    if (std::abs(cur.real()) + std::abs(cur.imag()) > kRescaleAbove) {
      cur *= kRescaleBy;
      above *= kRescaleBy;
      sum *= kRescaleBy;
      for (int j = k; j <= nu_max; ++j) y[j] *= kRescaleBy;
    }
  }
  y[0] = cur;
  sum += cur;
  if (generating_sum != nullptr) *generating_sum = sum;
  return y;
}

}  // namespace

int miller_start_order(cplx z, int nu_max) {
  // Past |Im z| the recurrence leaves its oscillatory regime; beyond that
  // sqrt(80|z|) further orders bring I_k/I_0 below e^{-40} for large real z,
  // and the constant margin covers small |z|.
  const double a = std::abs(z);
  const double start = static_cast<double>(nu_max) + 20.0 + std::ceil(std::abs(z.imag()) + std::sqrt(80.0 * a));
  if (!(start <= kMaxStartOrder)) throw Overflow("bessel: argument or order too large for the backward recurrence");
  return static_cast<int>(start);
}

std::vector<cplx> i_family_scaled(cplx z, int nu_max) {
  validate(z, nu_max);
  if (z == cplx{0.0, 0.0}) {
    std::vector<cplx> out(static_cast<std::size_t>(nu_max) + 1, cplx{0.0, 0.0});
    out[0] = 1.0;
    return out;
  }
  cplx sum;
  auto y = backward_recurrence(z, nu_max, &sum);
  // sum is proportional to e^z; dividing by it and multiplying by the phase
  // e^{i Im z} yields I_k e^{-Re z}.
  const cplx factor = std::polar(1.0, z.imag()) / sum;
  for (auto& v : y) v *= factor;
  return y;
}

std::vector<cplx> i_family(const BesselArg& arg) {
  validate(arg.z, arg.nu_max);
  if (arg.z.real() > kMaxUnscaledRe)
    throw Overflow("bessel: e^{Re z} overflows for Re z = " + std::to_string(arg.z.real()) +
                   "; use i_family_scaled or i_ratios");
  auto y = i_family_scaled(arg.z, arg.nu_max);
  const double e = std::exp(arg.z.real());
  for (auto& v : y) v *= e;
  return y;
}

std::vector<cplx> i_ratios(cplx z, int nu_max) {
  validate(z, nu_max);
  if (z == cplx{0.0, 0.0}) {
    std::vector<cplx> out(static_cast<std::size_t>(nu_max) + 1, cplx{0.0, 0.0});
    out[0] = 1.0;
    return out;
  }
  auto y = backward_recurrence(z, nu_max, nullptr);
  const cplx inv0 = 1.0 / y[0];
  for (auto& v : y) v *= inv0;
  y[0] = 1.0;
  return y;
}

Ratio i_ratio(int nu, cplx z) {
  if (nu < 0) throw InvalidArgument("bessel: order must be >= 0");
  validate(z, nu);
  if (nu == 0) return {cplx{1.0, 0.0}, false};
  if (z == cplx{0.0, 0.0}) return {cplx{0.0, 0.0}, true};
  return {i_ratios(z, nu)[nu], false};
}

std::vector<double> k_family(int nu_max, double x) {
  if (nu_max < 0) throw InvalidArgument("bessel: nu_max must be >= 0");
  if (!std::isfinite(x) || x <= 0.0) throw InvalidArgument("bessel: K requires a finite x > 0");
  if (x > kMaxUnscaledRe) throw Overflow("bessel: K_nu(x) underflows for x > 700");

  // Scaled integrals e^x K_nu(x) = int_0^T e^{-x (cosh t - 1)} cosh(nu t) dt,
  // with T where the integrand has decayed below e^{-60} relative.
  const double upper = std::acosh(1.0 + 60.0 / x);
  constexpr int kPanels = 8192;
  const double k0 = simpson([x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)); }, 0.0, upper, kPanels);
  const double k1 = simpson([x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(t); }, 0.0,
                            upper, kPanels);

  std::vector<double> k(static_cast<std::size_t>(nu_max) + 1);
  const double scale = std::exp(-x);
  k[0] = k0;
  if (nu_max >= 1) k[1] = k1;
  for (int nu = 1; nu < nu_max; ++nu) k[nu + 1] = k[nu - 1] + (2.0 * nu / x) * k[nu];
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] *= scale;
    if (!std::isfinite(k[i])) throw Overflow("bessel: K_" + std::to_string(i) + " overflows");
  }
  return k;
}

double i0_asymptotic_gap(double t) {
  if (!std::isfinite(t) || t <= 0.0) throw InvalidArgument("bessel: asymptotic gap needs t > 0");
  const double i0_scaled = i_family_scaled(cplx{t, 0.0}, 0)[0].real();
  return std::abs(std::sqrt(2.0 * std::numbers::pi * t) * i0_scaled - 1.0);
}

Convergent cf_eval(std::span<const double> a) {
  if (a.empty()) throw InvalidArgument("cf_eval: no partial quotients");
  for (double v : a)
    if (!std::isfinite(v)) throw InvalidArgument("cf_eval: partial quotient is not finite");

  double p_prev = 1.0, q_prev = 0.0;  // p_{-1}, q_{-1}
  double p = a[0], q = 1.0;           // p_0, q_0
  int scale = 0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    const double p_next = a[n] * p + p_prev;
    const double q_next = a[n] * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    if (q == 0.0)
      throw DegenerateFraction("cf_eval: convergent denominator q_" + std::to_string(n) + " is zero", n);
    if (std::max(std::abs(p), std::abs(q)) > 0x1p+500) {
      p = std::ldexp(p, -500);
      q = std::ldexp(q, -500);
      p_prev = std::ldexp(p_prev, -500);
      q_prev = std::ldexp(q_prev, -500);
      scale += 500;
    }
  }
  return {p / q, p, q, scale};
}

}  // namespace ulab::bessel
