#include "ulab/minimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ulab/bessel.hpp"
#include "ulab/errors.hpp"
#include "ulab/quadrature.hpp"

namespace ulab {
namespace {

std::vector<double> real_ratios(double z, int nu_max) {
  const auto r = bessel::i_ratios(cplx{z, 0.0}, nu_max);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i].real();
  return out;
}

void check_truncation(double z, int d, int N) {
  if (N < 0) throw InvalidArgument("minimizer: box radius must be >= 0");
  const double tail = d * bessel_tail(z, N);
  if (tail >= kTailTolerance)
    throw TruncationError("minimizer: radius " + std::to_string(N) + " loses relative mass " + std::to_string(tail) +
                          " >= 1e-13; use radius >= " + std::to_string(minimal_radius(z, kTailTolerance / d)));
}

// Factor turning the CenterOne sequence into the requested normalization,
// given its squared l^2 norm and its nearest-neighbour quantity.
double mode_scale(NormMode mode, double norm_sq, double quantity) {
  switch (mode) {
    case NormMode::CenterOne:
      return 1.0;
    case NormMode::UnitL2:
      return 1.0 / std::sqrt(norm_sq);
    case NormMode::Commutator2:
      if (quantity == 0.0) throw DegenerateInput("minimizer: normalization quantity vanishes");
      return std::sqrt(2.0 / quantity);
  }
  return 1.0;
}

}  // namespace

void validate(const MinimizerSpec& spec) {
  if (!std::isfinite(spec.alpha) || spec.alpha <= 0.0)
    throw InvalidArgument("minimizer: alpha must be finite and > 0 (alpha < 0 is not supported)");
  if (!std::isfinite(spec.h) || spec.h <= 0.0) throw InvalidArgument("minimizer: h must be finite and > 0");
  if (spec.d < 1 || spec.d > 3) throw UnsupportedDimension("minimizer: d must be 1, 2 or 3");
}

double main_argument(const MinimizerSpec& spec) {
  validate(spec);
  return 1.0 / (spec.alpha * spec.h * spec.h);
}

double second_argument(const MinimizerSpec& spec) {
  validate(spec);
  return 1.0 / (spec.alpha * spec.h);
}

int recommended_radius(const MinimizerSpec& spec) {
  return minimal_radius(main_argument(spec), kTailTolerance / spec.d);
}

int recommended_radius_second(const MinimizerSpec& spec) {
  return minimal_radius(second_argument(spec), kTailTolerance);
}

LatticeSeq minimizer_main(const MinimizerSpec& spec, int N) {
  const double z = main_argument(spec);
  check_truncation(z, spec.d, N);
  const auto r = real_ratios(z, N);
  LatticeSeq w(spec.d, N, spec.h);
  auto vals = w.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = w.index_of(i);
    double p = 1.0;
    for (int j = 0; j < spec.d; ++j) p *= r[static_cast<std::size_t>(std::abs(k[static_cast<std::size_t>(j)]))];
    vals[i] = p;
  }
  if (spec.norm != NormMode::CenterOne) {
    const double n = norm(w);
    w *= mode_scale(spec.norm, n * n, normalization_quantity(w));
  }
  return w;
}

LatticeSeq minimizer_second(const MinimizerSpec& spec, int N) {
  if (spec.d != 1) throw UnsupportedDimension("minimizer_second: defined for d = 1 only");
  const double z = second_argument(spec);
  check_truncation(z, 1, N);
  const auto r = real_ratios(z, N);
  LatticeSeq w(1, N, spec.h);
  // i^{-k} cycles through 1, -i, -1, i.
  static constexpr std::array<cplx, 4> kPhase{cplx{1, 0}, cplx{0, -1}, cplx{-1, 0}, cplx{0, 1}};
  for (int k = -N; k <= N; ++k) w[{k, 0, 0}] = kPhase[static_cast<std::size_t>(((k % 4) + 4) % 4)] * r[std::abs(k)];
  if (spec.norm != NormMode::CenterOne) {
    const double n = norm(w);
    w *= mode_scale(spec.norm, n * n, std::abs(second_normalization_quantity(w)));
  }
  return w;
}

double main_recurrence_residual(const LatticeSeq& w, double alpha) {
  const double h = w.mesh();
  double worst = 0.0;
  const auto vals = w.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = w.index_of(i);
    for (int j = 0; j < w.dim(); ++j) {
      const Index e = unit(j);
      if (!w.contains(k + e) || !w.contains(k - e)) continue;
      const cplx a = alpha * k[static_cast<std::size_t>(j)] * h * vals[i];
      const cplx b = w.at(k + e) / (2.0 * h), c = w.at(k - e) / (2.0 * h);
      const double scale = std::abs(a) + std::abs(b) + std::abs(c);
      if (scale > 0.0) worst = std::max(worst, std::abs(a + b - c) / scale);
    }
  }
  return worst;
}

double second_recurrence_residual(const LatticeSeq& w, double alpha) {
  if (w.dim() != 1) throw UnsupportedDimension("second relation is defined for d = 1 only");
  const double h = w.mesh();
  double worst = 0.0;
  for (int k = -w.radius() + 1; k <= w.radius() - 1; ++k) {
    const cplx a = alpha * k * h * w.at({k, 0, 0});
    const cplx b = cplx{0.0, 0.5} * w.at({k + 1, 0, 0}), c = cplx{0.0, 0.5} * w.at({k - 1, 0, 0});
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    if (scale > 0.0) worst = std::max(worst, std::abs(a + b + c) / scale);
  }
  return worst;
}

double periodic_profile(const MinimizerSpec& spec, const std::vector<double>& x) {
  const double z = main_argument(spec);
  if (static_cast<int>(x.size()) != spec.d) throw InvalidArgument("periodic_profile: point has wrong dimension");
  const double h = spec.h;
  const double i0s = bessel::i_family_scaled(cplx{z, 0.0}, 0)[0].real();

  // Infinite-lattice sums of the CenterOne minimizer:
  // sum_k r_k^2 = I_0(2z)/I_0(z)^2 and sum_k r_k r_{k+1} = I_1(2z)/I_0(z)^2.
  const auto two = bessel::i_family_scaled(cplx{2.0 * z, 0.0}, 1);
  const double sq = two[0].real() / (i0s * i0s);
  const double nn = two[1].real() / (i0s * i0s);
  const double hd = std::pow(h, spec.d);
  const double norm_sq = hd * std::pow(sq, spec.d);
  const double quantity = spec.d * hd * nn * std::pow(sq, spec.d - 1);
  const double s = mode_scale(spec.norm, norm_sq, quantity);

  double f = s * std::pow(h / (2.0 * std::numbers::pi), spec.d);
  for (double xj : x) {
    if (!std::isfinite(xj)) throw InvalidArgument("periodic_profile: non-finite coordinate");
    f *= std::exp(z * (std::cos(xj * h) - 1.0)) / i0s;
  }
  return f;
}

double profile_l2_log_constant(const MinimizerSpec& spec) {
  const double z = main_argument(spec);
  const double h = spec.h;
  // int_{-pi/h}^{pi/h} e^{2z cos(xh)} dx = e^{2z} int e^{2z(cos(xh)-1)} dx; the
  // peak has width ~ 1/(h sqrt z), so the panel count grows with sqrt z.
  int panels = std::max(4096, static_cast<int>(std::ceil(400.0 * std::sqrt(z))));
  panels += panels % 2;
  const double lim = std::numbers::pi / h;
  const double reduced =
      simpson([&](double x) { return std::exp(2.0 * z * (std::cos(x * h) - 1.0)); }, -lim, lim, panels);
  return -0.5 * spec.d * (2.0 * z + std::log(reduced));
}

std::vector<int> convergence_indices(const std::vector<double>& x, int j) {
  if (j < 1) throw InvalidArgument("convergence: j must be >= 1");
  if (x.empty() || x.size() > 3) throw UnsupportedDimension("convergence: point must have 1 to 3 coordinates");
  double xmax = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("convergence: non-finite coordinate");
    xmax = std::max(xmax, std::abs(v));
  }
  std::vector<int> k(x.size(), 0);
  if (xmax == 0.0) return k;
  for (std::size_t m = 0; m < x.size(); ++m) {
    // x_m / h_j; an exact integer up to rounding (always so for the maximal
    // coordinate) must not be pushed to the next one by ceil/floor.
    const double q = x[m] * j / xmax;
    const double r = std::nearbyint(q);
    if (std::abs(q - r) <= 1e-12 * std::max(1.0, std::abs(q)))
      k[m] = static_cast<int>(r);
    else
      k[m] = static_cast<int>(x[m] >= 0.0 ? std::ceil(q) : std::floor(q));
  }
  return k;
}

ConvergencePoint gaussian_convergence(const std::vector<double>& x, int j) {
  const auto k = convergence_indices(x, j);
  ConvergencePoint p;
  p.x = x;
  p.j = j;
  double xmax = 0.0, r2 = 0.0;
  for (double v : x) {
    xmax = std::max(xmax, std::abs(v));
    r2 += v * v;
  }
  p.gauss_value = std::exp(-0.5 * r2);
  if (xmax == 0.0) {
    p.f_j_value = 1.0;
    p.error = 0.0;
    return p;
  }
  const double z = static_cast<double>(j) * j / (xmax * xmax);
  int top = 0;
  for (int v : k) top = std::max(top, std::abs(v));
  const auto r = real_ratios(z, top);
  double f = 1.0;
  for (int v : k) f *= r[static_cast<std::size_t>(std::abs(v))];
  p.f_j_value = f;
  p.error = std::abs(f - p.gauss_value);
  return p;
}

}  // namespace ulab
