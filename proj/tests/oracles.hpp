#pragma once

// Independent reference computations used only by the test suites. Nothing
// here calls into the library's numerical routines.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace ulab::testing {

using cplx = std::complex<double>;

/// Composite Simpson rule, written out separately from the library's helper.
template <class F>
double simpson_oracle(F&& f, double a, double b, int panels = 4096) {
  const double step = (b - a) / panels;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < panels; i += 2) odd += f(a + i * step);
  for (int i = 2; i < panels; i += 2) even += f(a + i * step);
  return (f(a) + f(b) + 4.0 * odd + 2.0 * even) * step / 3.0;
}

/// I_m(x) = (1/pi) int_0^pi e^{x cos t} cos(m t) dt.
inline double bessel_i_quadrature(int m, double x, int panels = 4096) {
  return simpson_oracle([&](double t) { return std::exp(x * std::cos(t)) * std::cos(m * t); }, 0.0,
                        std::numbers::pi, panels) /
         std::numbers::pi;
}

/// J_0(y) = sum_m (-1)^m (y/2)^{2m} / (m!)^2, summed directly.
inline double bessel_j0_series(double y) {
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= -(y * y / 4.0) / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-20 * std::abs(sum)) break;
  }
  return sum;
}

/// K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt, trapezoid rule on [0, T].
inline double bessel_k_integral(int nu, double x) {
  const double upper = std::acosh(1.0 + 80.0 / x);
  const int n = 200000;
  const double step = upper / n;
  double acc = 0.5 * std::exp(-x);
  for (int i = 1; i <= n; ++i) {
    const double t = i * step;
    acc += (i == n ? 0.5 : 1.0) * std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
  }
  return acc * step;
}

/// a_0 + 1/(a_1 + 1/(... + 1/a_n)), evaluated from the innermost quotient out.
inline double cf_nested(std::span<const double> a) {
  double v = a.back();
  for (std::size_t i = a.size() - 1; i-- > 0;) v = a[i] + 1.0 / v;
  return v;
}

inline std::vector<cplx> random_complex(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

/// Classical RK4 for d_t u = i (u_{k+1} - 2u_k + u_{k-1}) / h^2 on a 1-D
/// box of `size` sites with zero outside, from u0 (length `size`).
inline std::vector<cplx> schrodinger_rk4(std::vector<cplx> u, double h, double t, int steps) {
  const std::size_t n = u.size();
  const double dt = t / steps;
  auto rhs = [&](const std::vector<cplx>& x) {
    std::vector<cplx> r(n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx left = k > 0 ? x[k - 1] : cplx{0.0, 0.0};
      const cplx right = k + 1 < n ? x[k + 1] : cplx{0.0, 0.0};
      r[k] = cplx{0.0, 1.0} * (left - 2.0 * x[k] + right) / (h * h);
    }
    return r;
  };
  auto axpy = [&](const std::vector<cplx>& x, const std::vector<cplx>& y, double a) {
    std::vector<cplx> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = x[k] + a * y[k];
    return r;
  };
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(u);
    const auto k2 = rhs(axpy(u, k1, dt / 2));
    const auto k3 = rhs(axpy(u, k2, dt / 2));
    const auto k4 = rhs(axpy(u, k3, dt));
    for (std::size_t k = 0; k < n; ++k) u[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return u;
}

inline double relerr(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace ulab::testing
