#include "ulab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulab/bessel.hpp"
#include "ulab/errors.hpp"
#include "ulab/spectral.hpp"

namespace ulab {
namespace {

constexpr cplx kI{0.0, 1.0};

void require_finite_time(double t) {
  if (!std::isfinite(t)) throw InvalidArgument("evolution: time must be finite");
}

LatticeSeq resized(const LatticeSeq& u, int R) { return R >= u.radius() ? u.padded(R) : u.cropped(R); }

// Fourth-order centered first derivative, applied to the exact second
// derivative: f' ~ sum c_i f(t + i delta) / delta, i = -2..2.
constexpr double kFirst[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr double kThirdStep = 0.1;

struct Fit {
  double a = 0.0, beta = 0.0, gamma = 0.0;
};

// a + beta t + gamma t^2 through (0, g0), (T/2, g1), (T, g2).
Fit three_point_fit(double T, double g0, double g1, double g2) {
  Fit f;
  f.a = g0;
  f.gamma = 2.0 * (g2 - 2.0 * g1 + g0) / (T * T);
  f.beta = (g2 - g0) / T - f.gamma * T;
  return f;
}

double max_abs_time(const std::vector<double>& times) {
  if (times.empty()) throw InvalidArgument("virial trace: no sample times");
  double T = 0.0;
  for (double t : times) {
    require_finite_time(t);
    T = std::max(T, std::abs(t));
  }
  if (T == 0.0) throw InvalidArgument("virial trace: sample times must not all be zero");
  return T;
}

// Fills the fit, residuals and third derivative of a trace from samplers of
// the centered observable G(tau) and of its exact second derivative D(tau).
// Differencing D once keeps the rounding of the third derivative at
// eps |D| / delta; differencing G three times would give eps |G| / delta^3.
template <class Sample, class Second>
void finish_trace(VirialTrace& tr, const std::vector<double>& times, Sample&& G, Second&& D) {
  const double T = max_abs_time(times);
  const Fit fit = three_point_fit(T, G(0.0), G(0.5 * T), G(T));
  tr.a_fit = fit.a;
  tr.b_fit = fit.gamma / tr.curvature;
  auto model = [&](double tau) { return fit.a + fit.gamma * tau * tau; };

  tr.times = times;
  tr.residual = 0.0;
  tr.third_derivative_max = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double r = std::abs(tr.F[i] - model(times[i]));
    tr.fit_residual.push_back(r);
    tr.residual = std::max(tr.residual, r);
    double third = 0.0;
    for (int s = -2; s <= 2; ++s)
      if (kFirst[s + 2] != 0.0) third += kFirst[s + 2] * D(times[i] + s * kThirdStep);
    tr.third_derivative_max = std::max(tr.third_derivative_max, std::abs(third) / kThirdStep);
  }
  for (int i = 0; i <= 8; ++i) {
    const double tau = -T + 2.0 * T * i / 8.0;
    tr.residual = std::max(tr.residual, std::abs(G(tau) - model(tau)));
  }
}

}  // namespace

int schrodinger_margin(double t, double h) {
  require_finite_time(t);
  return spectral::kernel_margin(2.0 * t / (h * h));
}

int coupled_margin(double t, double h) {
  require_finite_time(t);
  return spectral::kernel_margin(t / h);
}

LatticeSeq evolve_schrodinger(const LatticeSeq& u0, double t) {
  return evolve_schrodinger(u0, t, u0.radius() + schrodinger_margin(t, u0.mesh()));
}

LatticeSeq evolve_schrodinger(const LatticeSeq& u0, double t, int R) {
  require_finite_time(t);
  if (R < 0) throw InvalidArgument("evolution: negative output radius");
  if (t == 0.0) return resized(u0, R);
  const double h = u0.mesh();
  const double c = -4.0 * t / (h * h);
  return spectral::apply_separable(u0, R, schrodinger_margin(t, h), [c](double theta) {
    const double s = std::sin(0.5 * theta);
    return std::polar(1.0, c * s * s);
  });
}

LatticeSeq evolve_schrodinger_kernel(const LatticeSeq& u0, double t) {
  return evolve_schrodinger_kernel(u0, t, u0.radius() + schrodinger_margin(t, u0.mesh()));
}

LatticeSeq evolve_schrodinger_kernel(const LatticeSeq& u0, double t, int R) {
  require_finite_time(t);
  if (R < 0) throw InvalidArgument("evolution: negative output radius");
  if (t == 0.0) return resized(u0, R);
  const double h = u0.mesh();
  const int d = u0.dim();
  const int W = std::max(R, u0.radius());
  // One-axis kernel c_m = e^{-2it/h^2} I_m(2it/h^2), |m| <= 2W.
  const double y = 2.0 * t / (h * h);
  auto c = bessel::i_family_scaled(cplx{0.0, y}, 2 * W);
  const cplx phase = std::polar(1.0, -y);
  for (auto& v : c) v *= phase;

  LatticeSeq cur = u0.padded(W);
  for (int j = 0; j < d; ++j) {
    LatticeSeq next(d, W, h);
    auto out = next.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
      Index k = next.index_of(i);
      const int kj = k[j];
      cplx s{0.0, 0.0};
      for (int m = -W; m <= W; ++m) {
        k[j] = m;
        const cplx v = cur[k];
        if (v != cplx{0.0, 0.0}) s += c[static_cast<std::size_t>(std::abs(kj - m))] * v;
      }
      out[i] = s;
    }
    cur = std::move(next);
  }
  return resized(cur, R);
}

LatticeSeq gamma_family_evolve(const LatticeSeq& u0, double gamma, double t) {
  require_finite_time(t);
  if (!std::isfinite(gamma)) throw InvalidArgument("evolution: gamma must be finite");
  const double h = u0.mesh();
  const int margin = schrodinger_margin(t, h);
  const int R = u0.radius() + margin;
  if (t == 0.0) return resized(u0, R);
  const double c = t / (h * h);
  return spectral::apply_separable(u0, R, margin,
                                   [c, gamma](double theta) { return std::polar(1.0, c * (2.0 * std::cos(theta) + gamma)); });
}

LatticeSeq minimizer_evolution(const MinimizerSpec& spec, double t, int R) {
  require_finite_time(t);
  if (R < 0) throw InvalidArgument("evolution: negative output radius");
  const double z = main_argument(spec);
  const double h = spec.h;
  const double scale = minimizer_main(spec, recommended_radius(spec)).at({0, 0, 0}).real();
  // I_k(w)/I_0(z) = [I_k(w)/I_0(w)] [I_0(w)/I_0(z)]; both scaled by e^{-z}.
  const cplx w{z, 2.0 * t / (h * h)};
  const auto r = bessel::i_ratios(w, R);
  const cplx rho = bessel::i_family_scaled(w, 0)[0] / bessel::i_family_scaled(cplx{z, 0.0}, 0)[0];
  const cplx axis_factor = std::polar(1.0, -2.0 * t / (h * h)) * rho;

  LatticeSeq out(spec.d, R, h);
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = out.index_of(i);
    cplx p{scale, 0.0};
    for (int j = 0; j < spec.d; ++j) p *= axis_factor * r[static_cast<std::size_t>(std::abs(k[j]))];
    vals[i] = p;
  }
  return out;
}

int minimizer_evolution_radius(const MinimizerSpec& spec, double t) {
  require_finite_time(t);
  const double z = main_argument(spec);
  const cplx w{z, 2.0 * t / (spec.h * spec.h)};
  const int top = bessel::miller_start_order(w, 0);
  const auto r = bessel::i_ratios(w, top);
  const double rho = std::abs(bessel::i_family_scaled(w, 0)[0] / bessel::i_family_scaled(cplx{z, 0.0}, 0)[0]);
  double peak = 0.0;
  for (const cplx& v : r) peak = std::max(peak, rho * std::abs(v));
  int last = 0;
  for (int k = 0; k <= top - 10; ++k)
    if (rho * std::abs(r[static_cast<std::size_t>(k)]) >= 1e-17 * peak) last = k;
  return last + 1;
}

double PhiWeight::operator()(const Index& k) const {
  double s = 0.0;
  for (std::size_t j = 0; j < axis.size(); ++j) s += axis[j](k[j]);
  return s;
}

PhiWeight PhiWeight::quadratic(int d, double h) {
  if (d < 1 || d > 3) throw UnsupportedDimension("phi: d must be 1, 2 or 3");
  PhiWeight p;
  for (int j = 0; j < d; ++j) p.axis.push_back([h](long k) { return (k * h) * (k * h); });
  return p;
}

PhiWeight PhiWeight::constant(int d, double c) {
  if (d < 1 || d > 3) throw UnsupportedDimension("phi: d must be 1, 2 or 3");
  PhiWeight p;
  p.axis.push_back([c](long) { return c; });
  for (int j = 1; j < d; ++j) p.axis.push_back([](long) { return 0.0; });
  return p;
}

PhiWeight PhiWeight::from_table(const std::vector<double>& values, int d, int N) {
  LatticeSeq shape(d, N, 1.0);
  if (values.size() != shape.size())
    throw InvalidArgument("phi: table has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(shape.size()));
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("phi: non-finite table value");
  auto at = [&](const Index& k) { return values[shape.linear(k)]; };
  const double origin = at({0, 0, 0});
  std::vector<std::vector<double>> g(static_cast<std::size_t>(d), std::vector<double>(2 * N + 1));
  for (int j = 0; j < d; ++j)
    for (int m = -N; m <= N; ++m) {
      Index k{0, 0, 0};
      k[j] = m;
      g[j][m + N] = at(k) - (j == 0 ? 0.0 : origin);
    }
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Index k = shape.index_of(i);
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += g[j][k[j] + N];
    scale = std::max(scale, std::abs(values[i]));
    worst = std::max(worst, std::abs(values[i] - s));
  }
  if (worst > 1e-12 * std::max(scale, 1e-300))
    throw UnsupportedWeight("phi: table is not a sum of one-axis functions (deviation " + std::to_string(worst) + ")");
  PhiWeight p;
  for (int j = 0; j < d; ++j)
    p.axis.push_back([gj = g[j], N](long k) { return gj[static_cast<std::size_t>(std::clamp<long>(k, -N, N) + N)]; });
  return p;
}

double weighted_mass(const LatticeSeq& u, const PhiWeight& phi) {
  if (phi.dim() != u.dim()) throw InvalidArgument("phi: dimension mismatch");
  double s = 0.0;
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) s += phi(u.index_of(i)) * std::norm(vals[i]);
  return u.cell() * s;
}

double virial_first(const LatticeSeq& u, const PhiWeight& phi) {
  if (phi.dim() != u.dim()) throw InvalidArgument("phi: dimension mismatch");
  const double h = u.mesh();
  cplx s{0.0, 0.0};
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = u.index_of(i);
    for (int j = 0; j < u.dim(); ++j) {
      const Index e = unit(j);
      const double dphi = (phi(k + e) - phi(k)) / h;
      s += dphi * vals[i] * std::conj((u.at(k + e) - vals[i]) / h);
    }
  }
  return -2.0 * u.cell() * s.imag();
}

double virial_second(const LatticeSeq& u, const PhiWeight& phi) {
  if (phi.dim() != u.dim()) throw InvalidArgument("phi: dimension mismatch");
  const double h = u.mesh(), h2 = h * h;
  const int d = u.dim();
  auto second = [&](const Index& k, int j) {
    const Index e = unit(j);
    return (phi(k + e) - 2.0 * phi(k) + phi(k - e)) / h2;
  };
  auto lap = [&](const Index& k) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += second(k, j);
    return s;
  };

  const auto a = op_momentum(u);
  double hess = 0.0;
  const auto& box = a[0];
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Index k = box.index_of(i);
    for (int j = 0; j < d; ++j) hess += second(k, j) * std::norm(a[j].values()[i]);
  }
  double bilap = 0.0;
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == cplx{0.0, 0.0}) continue;
    const Index k = u.index_of(i);
    double s = 0.0;
    for (int l = 0; l < d; ++l) {
      const Index e = unit(l);
      s += (lap(k + e) - 2.0 * lap(k) + lap(k - e)) / h2;
    }
    bilap += s * std::norm(vals[i]);
  }
  return u.cell() * (4.0 * hess - bilap);
}

double virial_general(const LatticeSeq& u0, const PhiWeight& phi, double t) {
  return virial_second(evolve_schrodinger(u0, t), phi);
}

VirialTrace virial_trace_schrodinger(const LatticeSeq& u0, const std::vector<double>& times) {
  max_abs_time(times);
  const double q = normalization_quantity(u0);
  if (q == 0.0 || !std::isfinite(q))
    throw DegenerateInput("virial: normalization quantity Re h^d sum u_k conj(u_{k+e_j}) is zero");
  VirialTrace tr;
  tr.curvature = 4.0;
  tr.scale = std::sqrt(2.0 / std::abs(q));
  const LatticeSeq u = cplx{tr.scale, 0.0} * u0;
  const PhiWeight phi = PhiWeight::quadratic(u.dim(), u.mesh());
  tr.time_shift = -virial_first(u, phi) / virial_second(u, phi);
  tr.a_initial = weighted_mass(u, phi);
  const double n0 = norm(u);

  auto G = [&](double tau) { return weighted_mass(evolve_schrodinger(u, tr.time_shift + tau), phi); };
  for (double tau : times) {
    const LatticeSeq s = evolve_schrodinger(u, tr.time_shift + tau);
    tr.F.push_back(weighted_mass(s, phi));
    tr.Fdot.push_back(virial_first(s, phi));
    tr.Fddot.push_back(virial_second(s, phi));
    tr.norm_drift = std::max(tr.norm_drift, std::abs(norm(s) - n0));
  }
  auto D = [&](double tau) { return virial_second(evolve_schrodinger(u, tr.time_shift + tau), phi); };
  finish_trace(tr, times, G, D);
  return tr;
}

LatticeSeq coupled_partner(const LatticeSeq& u, CoupledVariant variant) {
  if (u.dim() != 1) throw UnsupportedDimension("coupled system is defined for d = 1 only");
  LatticeSeq v(1, u.radius(), u.mesh());
  for (int k = -u.radius(); k <= u.radius(); ++k) {
    const cplx x = u.at({k, 0, 0});
    v[{k, 0, 0}] = variant == CoupledVariant::Conjugate ? std::conj(x) : ((k % 2 == 0) ? -x : x);
  }
  return v;
}

std::pair<LatticeSeq, LatticeSeq> evolve_coupled(const LatticeSeq& u0, const LatticeSeq& v0, double t) {
  const int R = std::max(u0.radius(), v0.radius()) + coupled_margin(t, u0.mesh());
  return evolve_coupled(u0, v0, t, R);
}

std::pair<LatticeSeq, LatticeSeq> evolve_coupled(const LatticeSeq& u0, const LatticeSeq& v0, double t, int R) {
  require_finite_time(t);
  if (u0.dim() != 1 || v0.dim() != 1) throw UnsupportedDimension("coupled system is defined for d = 1 only");
  if (u0.mesh() != v0.mesh()) throw InvalidArgument("coupled system: u and v must share the mesh");
  if (R < 0) throw InvalidArgument("evolution: negative output radius");
  if (t == 0.0) return {resized(u0, R), resized(v0, R)};
  const double h = u0.mesh();
  const int N = std::max(u0.radius(), v0.radius());
  const int M = spectral::grid_size(N, R, coupled_margin(t, h));
  spectral::Transform fu(1, M), fv(1, M);
  spectral::embed(u0, fu);
  spectral::embed(v0, fv);
  fu.forward();
  fv.forward();
  // With uhat(theta) = sum u_k e^{-i theta k}: d_t uhat = s vhat, d_t vhat = -s uhat, s = -sin(theta)/h.
  auto du = fu.data();
  auto dv = fv.data();
  for (int n = 0; n < M; ++n) {
    const double s = -std::sin(spectral::frequency(n, M)) / h;
    const double c = std::cos(s * t), sn = std::sin(s * t);
    const cplx a = du[n], b = dv[n];
    du[n] = c * a + sn * b;
    dv[n] = -sn * a + c * b;
  }
  fu.backward();
  fv.backward();
  return {spectral::extract(fu, 1, R, h), spectral::extract(fv, 1, R, h)};
}

VirialTrace virial_trace_coupled(const LatticeSeq& u0, CoupledVariant variant, const std::vector<double>& times) {
  max_abs_time(times);
  const cplx q = second_normalization_quantity(u0);
  if (std::abs(q) == 0.0 || !std::isfinite(std::abs(q)))
    throw DegenerateInput("virial: normalization quantity h^2 sum (u_{k+1}-u_{k-1})/2 conj(u_k) is zero");
  VirialTrace tr;
  tr.curvature = 1.0;
  tr.scale = std::sqrt(2.0 / std::abs(q));
  const LatticeSeq u = cplx{tr.scale, 0.0} * u0;
  const LatticeSeq v = coupled_partner(u, variant);
  const double h = u.mesh();
  const PhiWeight phi = PhiWeight::quadratic(1, h);

  auto fdot = [h](const LatticeSeq& a, const LatticeSeq& b) {
    cplx s{0.0, 0.0};
    for (int k = -a.radius(); k <= a.radius(); ++k)
      s += static_cast<double>(k) * k * (b.at({k + 1, 0, 0}) - b.at({k - 1, 0, 0})) * std::conj(a.at({k, 0, 0}));
    return -h * h * s.imag();
  };
  auto fddot = [h](const LatticeSeq& a) {
    double s = 0.0;
    for (int k = -a.radius() - 1; k <= a.radius() + 1; ++k)
      s += std::norm(0.5 * (a.at({k + 1, 0, 0}) + a.at({k - 1, 0, 0})));
    return 2.0 * h * s;
  };

  tr.time_shift = -fdot(u, v) / fddot(u);
  tr.a_initial = weighted_mass(u, phi);
  const double nu = norm(u), nv = norm(v);
  const double ref = std::max(sup_norm(u) * sup_norm(u), 1e-300);
  auto G = [&](double tau) { return weighted_mass(evolve_coupled(u, v, tr.time_shift + tau).first, phi); };
  for (double tau : times) {
    const auto [a, b] = evolve_coupled(u, v, tr.time_shift + tau);
    tr.F.push_back(weighted_mass(a, phi));
    tr.Fdot.push_back(fdot(a, b));
    tr.Fddot.push_back(fddot(a));
    tr.norm_drift = std::max({tr.norm_drift, std::abs(norm(a) - nu), std::abs(norm(b) - nv)});
    for (int k = -a.radius() - 1; k <= a.radius() + 1; ++k) {
      const double m = std::abs(std::norm(a.at({k, 0, 0})) - std::norm(b.at({k, 0, 0})));
      const double c = std::abs((a.at({k + 1, 0, 0}) * std::conj(a.at({k - 1, 0, 0}))).real() -
                                (b.at({k + 1, 0, 0}) * std::conj(b.at({k - 1, 0, 0}))).real());
      tr.hypothesis_residual = std::max({tr.hypothesis_residual, m / ref, c / ref});
    }
  }
  auto D = [&](double tau) { return fddot(evolve_coupled(u, v, tr.time_shift + tau).first); };
  finish_trace(tr, times, G, D);
  return tr;
}

double coupled_ode_residual(const LatticeSeq& u0, const LatticeSeq& v0, double t, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("coupled_ode_residual: step must be > 0");
  const double h = u0.mesh();
  const int R = std::max(u0.radius(), v0.radius()) + coupled_margin(std::abs(t) + delta, h) + 1;
  const auto [u, v] = evolve_coupled(u0, v0, t, R);
  const auto [up, vp] = evolve_coupled(u0, v0, t + delta, R);
  const auto [um, vm] = evolve_coupled(u0, v0, t - delta, R);
  const double ref = std::max({sup_norm(u), sup_norm(v), 1e-300});
  double worst = 0.0;
  for (int k = -R + 1; k <= R - 1; ++k) {
    const Index K{k, 0, 0}, P{k + 1, 0, 0}, Q{k - 1, 0, 0};
    const cplx du = (up.at(K) - um.at(K)) / (2.0 * delta);
    const cplx dv = (vp.at(K) - vm.at(K)) / (2.0 * delta);
    worst = std::max(worst, std::abs(du - kI * (v.at(P) - v.at(Q)) / (2.0 * h)));
    worst = std::max(worst, std::abs(dv + kI * (u.at(P) - u.at(Q)) / (2.0 * h)));
  }
  return worst / ref;
}

double coupled_wave_residual(const LatticeSeq& u0, CoupledVariant variant, double t, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("coupled_wave_residual: step must be > 0");
  const double h = u0.mesh();
  const LatticeSeq v0 = coupled_partner(u0, variant);
  const int R = u0.radius() + coupled_margin(std::abs(t) + delta, h) + 2;
  const auto u = evolve_coupled(u0, v0, t, R).first;
  const auto up = evolve_coupled(u0, v0, t + delta, R).first;
  const auto um = evolve_coupled(u0, v0, t - delta, R).first;
  const double ref = std::max(sup_norm(u), 1e-300);
  double worst = 0.0;
  for (int k = -R; k <= R; ++k) {
    const Index K{k, 0, 0};
    const cplx dtt = (up.at(K) - 2.0 * u.at(K) + um.at(K)) / (delta * delta);
    const cplx wave = (u.at({k + 2, 0, 0}) - 2.0 * u.at(K) + u.at({k - 2, 0, 0})) / (4.0 * h * h);
    worst = std::max(worst, std::abs(dtt - wave));
  }
  return worst / ref;
}

IntertwineResult intertwine_check(const MinimizerSpec& spec, const LatticeSeq& u0, double t) {
  require_finite_time(t);
  validate(spec);
  if (u0.dim() != spec.d || u0.mesh() != spec.h)
    throw InvalidArgument("intertwine_check: u0 must share the minimizer's dimension and mesh");
  IntertwineResult res;
  const cplx two_it{0.0, 2.0 * t};

  const LatticeSeq w = minimizer_evolution(spec, t, minimizer_evolution_radius(spec, t));
  {
    const auto aw = op_momentum(w);
    const auto sw = op_position(w);
    VectorSeq r;
    // (A + alpha Lambda) w = (1 + 2 i alpha t) A w + alpha k h w.
    for (int j = 0; j < spec.d; ++j)
      r.push_back(add((1.0 + spec.alpha * two_it) * aw[j], cplx{spec.alpha, 0.0} * sw[j]));
    res.residual1 = norm(r) / norm(w);
  }

  const LatticeSeq U = evolve_schrodinger(u0, t);
  const auto au = op_momentum(U);
  const auto su = op_position(U);
  const auto s0 = op_position(u0);
  const double denom = norm(s0);
  if (denom == 0.0) throw DegenerateInput("intertwine_check: k h u0 vanishes");
  VectorSeq r;
  for (int j = 0; j < spec.d; ++j) {
    const LatticeSeq lam = add(su[j], two_it * au[j]);
    r.push_back(difference(lam, evolve_schrodinger(s0[j], t, U.radius() + 1)));
  }
  res.residual2 = norm(r) / denom;
  return res;
}

}  // namespace ulab
