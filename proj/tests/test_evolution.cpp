#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ulab/errors.hpp"
#include "ulab/evolution.hpp"

using namespace ulab;
using ulab::testing::random_complex;

namespace {

LatticeSeq random_seq(std::mt19937_64& rng, int d, int N, double h) {
  LatticeSeq u(d, N, h);
  return LatticeSeq(d, N, h, random_complex(rng, u.size()));
}

double sup_diff(const LatticeSeq& a, const LatticeSeq& b) { return sup_norm(difference(a, b)); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

// Minimizer on a box wide enough that truncation is below rounding.
LatticeSeq wide_minimizer(const MinimizerSpec& s) {
  return minimizer_main(s, minimal_radius(main_argument(s), 1e-34));
}

}  // namespace

TEST_CASE("t = 0 is the identity") {
  std::mt19937_64 rng(1);
  const auto u = random_seq(rng, 2, 3, 0.5);
  const auto s = evolve_schrodinger(u, 0.0);
  CHECK(s.radius() == 3);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(s.values()[i] == u.values()[i]);
  const auto k = evolve_schrodinger_kernel(u, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(k.values()[i] == u.values()[i]);
  CHECK_THROWS_AS(evolve_schrodinger(u, NAN), InvalidArgument);
  CHECK_THROWS_AS(evolve_schrodinger(u, INFINITY), InvalidArgument);
}

TEST_CASE("unitarity") {
  std::mt19937_64 rng(2);
  for (int d : {1, 2}) {
    const auto u = random_seq(rng, d, 4, 0.7);
    for (double t : {0.1, 1.0, 5.0, 10.0}) CHECK(std::abs(norm(evolve_schrodinger(u, t)) - norm(u)) < 1e-12 * norm(u));
  }
}

TEST_CASE("spectral propagator agrees with an RK4 integration") {
  std::mt19937_64 rng(3);
  const auto u = random_seq(rng, 1, 5, 1.0);
  const int R = 40;
  std::vector<cplx> init(2 * R + 1, 0.0);
  for (int k = -5; k <= 5; ++k) init[k + R] = u.at({k, 0, 0});
  const auto ref = ulab::testing::schrodinger_rk4(init, 1.0, 0.8, 8000);
  const auto s = evolve_schrodinger(u, 0.8, R);
  double worst = 0.0;
  for (int k = -R; k <= R; ++k) worst = std::max(worst, std::abs(s.at({k, 0, 0}) - ref[k + R]));
  CHECK(worst < 1e-9);
}

TEST_CASE("kernel propagator agrees with a std::cyl_bessel_j convolution") {
  std::mt19937_64 rng(4);
  const double h = 0.8, t = 0.6;
  const auto u = random_seq(rng, 1, 4, h);
  const auto s = evolve_schrodinger_kernel(u, t);
  const double y = 2.0 * t / (h * h);
  for (int k = -s.radius(); k <= s.radius(); ++k) {
    cplx acc{0.0, 0.0};
    for (int m = -4; m <= 4; ++m) {
      const int n = k - m;
      const cplx in = std::pow(cplx{0.0, 1.0}, std::abs(n)) * std::cyl_bessel_j(std::abs(n), y);
      acc += in * u.at({m, 0, 0});
    }
    acc *= std::polar(1.0, -y);
    CHECK(std::abs(s.at({k, 0, 0}) - acc) < 1e-13);
  }
}

TEST_CASE("spectral and kernel propagators agree") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tt(0.05, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 2;
    const auto u = random_seq(rng, d, 1 + trial % 4, 0.5 + 0.05 * (trial % 10));
    const double t = tt(rng);
    CHECK(sup_diff(evolve_schrodinger(u, t), evolve_schrodinger_kernel(u, t)) < 1e-9);
  }
}

TEST_CASE("evolved minimizer matches its closed form") {
  for (int d : {1, 2})
    for (double h : {0.5, 1.0}) {
      const MinimizerSpec s{1.0, h, d};
      const auto w0 = wide_minimizer(s);
      for (double t : {0.1, 1.0, 5.0}) {
        const auto num = evolve_schrodinger(w0, t);
        const auto exact = minimizer_evolution(s, t, num.radius());
        CHECK(sup_diff(num, exact) < 1e-9);
      }
    }
  const MinimizerSpec s{1.0, 1.0, 1};
  const auto w0 = minimizer_evolution(s, 0.0, 20);
  CHECK(sup_diff(w0, minimizer_main(s, 40).cropped(20)) < 1e-15);
  CHECK(minimizer_evolution_radius(s, 5.0) > minimizer_evolution_radius(s, 0.0));
}

TEST_CASE("normalization quantity is conserved") {
  std::mt19937_64 rng(6);
  for (int d : {1, 2}) {
    const auto u = random_seq(rng, d, 3, 0.6);
    const double q = normalization_quantity(u);
    for (double t = 0.0; t <= 10.0; t += 2.5) CHECK(std::abs(normalization_quantity(evolve_schrodinger(u, t)) - q) < 1e-10);
  }
}

TEST_CASE("general Virial identity") {
  std::mt19937_64 rng(7);
  // phi = |kh|^2: F'' = 8 ||A u||^2.
  for (int d : {1, 2}) {
    const auto u = random_seq(rng, d, 3, 0.8);
    const double a = norm(op_momentum(u));
    CHECK(std::abs(virial_second(u, PhiWeight::quadratic(d, 0.8)) - 8.0 * a * a) < 1e-11 * a * a);
    CHECK(virial_general(u, PhiWeight::constant(d, 3.5), 0.4) == doctest::Approx(0.0).epsilon(1e-12));
  }

  // Random separable tables against a centered second difference of F.
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 2, NT = 24;
    const double h = 0.7 + 0.1 * trial;
    std::vector<std::vector<double>> axes(d, std::vector<double>(2 * NT + 1));
    for (auto& a : axes)
      for (auto& v : a) v = g(rng);
    LatticeSeq shape(d, NT, 1.0);
    std::vector<double> table(shape.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Index k = shape.index_of(i);
      for (int j = 0; j < d; ++j) table[i] += axes[j][k[j] + NT];
    }
    const auto phi = PhiWeight::from_table(table, d, NT);
    const auto u = random_seq(rng, d, 2, h);
    const double t = 0.3, step = 1e-2;
    const int R = 2 + schrodinger_margin(t + step, h);
    REQUIRE(R < NT - 2);
    auto F = [&](double s) { return weighted_mass(evolve_schrodinger(u, s, R), phi); };
    // Richardson-extrapolated centered differences, error O(step^4).
    auto d2 = [&](double e) { return (F(t + e) - 2.0 * F(t) + F(t - e)) / (e * e); };
    auto d1 = [&](double e) { return (F(t + e) - F(t - e)) / (2.0 * e); };
    const double fd = (4.0 * d2(0.5 * step) - d2(step)) / 3.0;
    CHECK(std::abs(virial_general(u, phi, t) - fd) < 1e-5);
    const double fd1 = (4.0 * d1(0.5 * step) - d1(step)) / 3.0;
    CHECK(std::abs(virial_first(evolve_schrodinger(u, t), phi) - fd1) < 1e-5);
  }

  std::vector<double> bad(9, 0.0);
  bad[4] = 1.0;  // phi(0,0) = 1 only: not a sum of one-axis functions
  CHECK_THROWS_AS(PhiWeight::from_table(bad, 2, 1), UnsupportedWeight);
}

TEST_CASE("Schrodinger Virial trace") {
  const auto times = linspace(0.0, 2.0, 11);
  for (int d : {1, 2}) {
    const MinimizerSpec s{1.0, 1.0, d, NormMode::Commutator2};
    const auto tr = virial_trace_schrodinger(wide_minimizer(s), times);
    CHECK(std::abs(tr.scale - 1.0) < 1e-12);
    CHECK(std::abs(tr.a_fit * tr.b_fit - 1.0) < 1e-8);
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(std::abs(tr.F[i] - (tr.a_fit + 4.0 * times[i] * times[i] / tr.a_fit)) < 1e-7);
    CHECK(tr.residual < 1e-8);
    CHECK(std::abs(tr.time_shift) < 1e-12);
  }

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_seq(rng, 1 + trial % 2, 3, 0.5 + 0.1 * trial);
    const auto tr = virial_trace_schrodinger(u, times);
    CHECK(tr.residual < 1e-8);
    CHECK(tr.a_fit * tr.b_fit > 1.0);
    CHECK(tr.third_derivative_max < 1e-7);
    CHECK(tr.norm_drift < 1e-12 * norm(u) * tr.scale);
    for (double f : tr.Fddot) CHECK(std::abs(f - tr.Fddot[0]) < 1e-9 * tr.Fddot[0]);
    CHECK(std::abs(tr.Fdot[0]) < 1e-9 * tr.a_fit);
    // Even after centering.
    const auto back = virial_trace_schrodinger(u, {-1.0, -0.5, 0.5, 1.0});
    CHECK(std::abs(back.F[0] - back.F[3]) < 1e-9 * back.F[0]);
    CHECK(std::abs(back.F[1] - back.F[2]) < 1e-9 * back.F[1]);
  }

  CHECK_THROWS_AS(virial_trace_schrodinger(LatticeSeq(1, 1, 1.0, {0.0, 1.0, 0.0}), times), DegenerateInput);
}

TEST_CASE("gamma family differs from Schrodinger by a phase") {
  std::mt19937_64 rng(9);
  for (int d : {1, 2}) {
    const double h = 0.6, t = 0.9;
    const auto u = random_seq(rng, d, 3, h);
    const auto base = evolve_schrodinger(u, t);
    CHECK(sup_diff(gamma_family_evolve(u, -2.0, t), base) < 1e-13);
    for (double gamma : {0.0, 2.0, 3.7}) {
      const auto gu = gamma_family_evolve(u, gamma, t);
      const cplx phase = std::polar(1.0, (gamma + 2.0) * d * t / (h * h));
      CHECK(sup_diff(gu, phase * base) < 1e-12);
      const auto phi = PhiWeight::quadratic(d, h);
      CHECK(std::abs(weighted_mass(gu, phi) - weighted_mass(base, phi)) < 1e-11 * weighted_mass(base, phi));
    }
  }
}

TEST_CASE("coupled system") {
  std::mt19937_64 rng(10);
  const auto u = random_seq(rng, 1, 4, 0.5);
  const auto v = random_seq(rng, 1, 4, 0.5);
  const auto [u0, v0] = evolve_coupled(u, v, 0.0);
  CHECK(sup_diff(u0, u) == 0.0);
  CHECK(sup_diff(v0, v) == 0.0);
  CHECK(coupled_ode_residual(u, v, 0.7) < 1e-6);

  for (auto variant : {CoupledVariant::Conjugate, CoupledVariant::Alternating}) {
    const auto p = coupled_partner(u, variant);
    for (double t : {0.3, 1.0, 2.0}) {
      const auto [a, b] = evolve_coupled(u, p, t);
      CHECK(std::abs(norm(a) - norm(b)) < 1e-12);
      CHECK(std::abs(norm(a) - norm(u)) < 1e-12);
      CHECK(coupled_wave_residual(u, variant, t) < 1e-5);
    }
    if (variant == CoupledVariant::Conjugate) {
      const auto [a, b] = evolve_coupled(u, p, 1.3);
      for (int k = -a.radius(); k <= a.radius(); ++k) CHECK(std::abs(b.at({k, 0, 0}) - std::conj(a.at({k, 0, 0}))) < 1e-13);
    }
  }
  CHECK_THROWS_AS(evolve_coupled(LatticeSeq(2, 1, 1.0), LatticeSeq(2, 1, 1.0), 0.1), UnsupportedDimension);
}

TEST_CASE("coupled Virial traces") {
  const auto times = linspace(0.0, 2.0, 9);
  for (auto variant : {CoupledVariant::Conjugate, CoupledVariant::Alternating}) {
    const MinimizerSpec s{1.0, 1.0, 1, NormMode::Commutator2};
    const auto w = minimizer_second(s, minimal_radius(1.0, 1e-34));
    const auto tr = virial_trace_coupled(w, variant, times);
    CHECK(std::abs(tr.a_initial * tr.b_fit - 1.0) < 1e-8);
    CHECK(tr.residual < 1e-8);
    CHECK(tr.hypothesis_residual < 1e-10);
    CHECK(tr.norm_drift < 1e-10);
    for (double f : tr.Fddot) CHECK(std::abs(f - tr.Fddot[0]) < 1e-9);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const auto u = random_seq(rng, 1, 2 + trial % 4, 0.4 + 0.1 * trial);
      const auto r = virial_trace_coupled(u, variant, times);
      CHECK(r.residual < 1e-8);
      CHECK(r.a_initial * r.b_fit >= 1.0 - 1e-9);
      CHECK(r.hypothesis_residual < 1e-10);
      CHECK(r.norm_drift < 1e-10 * norm(u) * r.scale);
      CHECK(r.third_derivative_max < 1e-7);
      for (double f : r.Fddot) CHECK(std::abs(f - r.Fddot[0]) < 1e-9 * r.Fddot[0]);
    }
  }
}

TEST_CASE("coupled flow does not conserve the second normalization") {
  const MinimizerSpec s{1.0, 1.0, 1, NormMode::Commutator2};
  const auto w = minimizer_second(s, minimal_radius(1.0, 1e-34));
  const auto tr = virial_trace_coupled(w, CoupledVariant::Conjugate, linspace(0.0, 2.0, 5));
  // F(t) = 1 + c t + t^2 with c = 1.25736..., minimum 1 - c^2/4.
  CHECK(tr.b_fit == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tr.a_initial == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tr.a_fit == doctest::Approx(0.604763).epsilon(1e-5));
  CHECK(tr.a_fit * tr.b_fit < 1.0);
  const auto [a, b] = evolve_coupled(w, coupled_partner(w, CoupledVariant::Conjugate), tr.time_shift);
  CHECK(std::abs(second_normalization_quantity(a)) < 0.5);
}

TEST_CASE("intertwining identity") {
  std::mt19937_64 rng(12);
  const MinimizerSpec s1{1.0, 1.0, 1};
  const auto u1 = random_seq(rng, 1, 3, 1.0);
  const auto r0 = intertwine_check(s1, u1, 0.0);
  CHECK(r0.residual2 == 0.0);
  CHECK(r0.residual1 < 1e-12);
  CHECK(intertwine_check(s1, u1, 0.7).residual1 < 1e-9);
  for (int d : {1, 2})
    for (double t : {0.3, 0.7, 2.0}) {
      const MinimizerSpec s{1.0, 0.8, d};
      const auto u = random_seq(rng, d, 3, 0.8);
      const auto r = intertwine_check(s, u, t);
      CHECK(r.residual1 < 1e-9);
      CHECK(r.residual2 < 1e-9);
    }
  CHECK_THROWS_AS(intertwine_check(s1, LatticeSeq(1, 2, 0.5), 0.1), InvalidArgument);
}
