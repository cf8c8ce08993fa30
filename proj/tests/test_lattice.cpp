#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ulab/errors.hpp"
#include "ulab/lattice.hpp"

using namespace ulab;
using ulab::testing::random_complex;

namespace {

LatticeSeq random_seq(std::mt19937_64& rng, int d, int N, double h) {
  LatticeSeq u(d, N, h);
  auto v = random_complex(rng, u.size());
  return LatticeSeq(d, N, h, v);
}

LatticeSeq delta(int d, int N, double h, Index k, cplx value = 1.0) {
  LatticeSeq u(d, N, h);
  u[k] = value;
  return u;
}

// Truncated main minimizer built from std::cyl_bessel_i, independent of the library.
LatticeSeq bessel_profile(double alpha, double h, int N) {
  LatticeSeq u(1, N, h);
  const double z = 1.0 / (alpha * h * h);
  const double i0 = std::cyl_bessel_i(0.0, z);
  for (int k = -N; k <= N; ++k) u[{k, 0, 0}] = std::cyl_bessel_i(static_cast<double>(std::abs(k)), z) / i0;
  return u;
}

}  // namespace

TEST_CASE("indexing and layout") {
  LatticeSeq u(2, 1, 0.5);
  CHECK(u.size() == 9);
  CHECK(u.linear({-1, -1, 0}) == 0);
  CHECK(u.linear({-1, 0, 0}) == 1);  // second index fastest
  CHECK(u.linear({0, -1, 0}) == 3);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.linear(u.index_of(i)) == i);
  CHECK(u.at({5, 0, 0}) == cplx{0.0, 0.0});
  CHECK_FALSE(u.contains({0, 0, 1}));
  CHECK(std::abs(u.cell() - 0.25) < 1e-16);

  CHECK_THROWS_AS(LatticeSeq(0, 1, 1.0), UnsupportedDimension);
  CHECK_THROWS_AS(LatticeSeq(4, 1, 1.0), UnsupportedDimension);
  CHECK_THROWS_AS(LatticeSeq(1, 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(LatticeSeq(1, 1, 1.0, {1.0, NAN, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(LatticeSeq(1, 1, 1.0, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("position operator") {
  const auto s0 = op_position(delta(1, 3, 1.0, {0, 0, 0}));
  CHECK(sup_norm(s0[0]) == 0.0);
  const auto s2 = op_position(delta(1, 3, 0.5, {2, 0, 0}));
  CHECK(s2[0].at({2, 0, 0}) == cplx{1.0, 0.0});
  auto u = delta(1, 3, 1.0, {2, 0, 0});
  u[{-2, 0, 0}] = 1.0;
  const double n = norm(op_position(u));
  CHECK(std::abs(n * n - 8.0) < 1e-13);
}

TEST_CASE("momentum operator") {
  const auto a = op_momentum(delta(1, 2, 1.0, {0, 0, 0}));
  CHECK(a[0].at({1, 0, 0}) == cplx{-0.5, 0.0});
  CHECK(a[0].at({-1, 0, 0}) == cplx{0.5, 0.0});
  CHECK(a[0].radius() == 3);

  LatticeSeq c(2, 4, 0.7);
  for (auto& v : c.values()) v = 3.0;
  const auto ac = op_momentum(c);
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) {
      CHECK(ac[0].at({i, j, 0}) == cplx{0.0, 0.0});
      CHECK(ac[1].at({i, j, 0}) == cplx{0.0, 0.0});
    }
}

TEST_CASE("symmetry of S and Delta, skew-symmetry of A") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const double h = 0.3 + 0.1 * trial;
    const auto u = random_seq(rng, d, 3, h), v = random_seq(rng, d, 3, h);
    const auto su = op_position(u), sv = op_position(v);
    const auto au = op_momentum(u), av = op_momentum(v);
    const auto ub = u.padded(4), vb = v.padded(4);
    for (int j = 0; j < d; ++j) {
      const cplx lhs = inner(su[j], v), rhs = inner(u, sv[j]);
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
      const cplx al = inner(au[j], vb), ar = inner(ub, av[j]);
      CHECK(std::abs(al + ar) < 1e-12 * (1.0 + std::abs(al)));
    }
    const cplx ll = inner(op_laplacian(u), vb), lr = inner(ub, op_laplacian(v));
    CHECK(std::abs(ll - lr) < 1e-12 * (1.0 + std::abs(ll)));
  }
}

TEST_CASE("laplacian stencil and forward-backward composition") {
  const auto l = op_laplacian(delta(1, 2, 1.0, {0, 0, 0}));
  CHECK(l.at({-1, 0, 0}) == cplx{1.0, 0.0});
  CHECK(l.at({0, 0, 0}) == cplx{-2.0, 0.0});
  CHECK(l.at({1, 0, 0}) == cplx{1.0, 0.0});

  std::mt19937_64 rng(11);
  const auto u = random_seq(rng, 2, 3, 0.4);
  // d_j^+ d_j^- u = d_j^+ (u_k - u_{k-e}) / h; build d^- by shifting d^+.
  const auto lap = op_laplacian(u);
  LatticeSeq composed(2, 5, 0.4);
  for (int j = 0; j < 2; ++j) {
    const auto fwd = forward_difference(u, j);
    LatticeSeq bwd(2, 4, 0.4);
    for (std::size_t i = 0; i < bwd.size(); ++i) {
      const Index k = bwd.index_of(i);
      bwd[k] = fwd.at(k - unit(j));
    }
    const auto second = forward_difference(bwd, j);
    for (std::size_t i = 0; i < composed.size(); ++i) {
      const Index k = composed.index_of(i);
      composed[k] += second.at(k);
    }
  }
  CHECK(norm(difference(lap, composed)) < 1e-12 * norm(lap));
}

TEST_CASE("commutator and difference forms of the left side agree") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const auto u = random_seq(rng, d, 1 + trial % 5, 0.2 + 0.01 * trial);
    const double a = lhs_commutator_form(u), b = lhs_difference_form(u);
    CHECK(std::abs(a - b) <= 1e-11 * std::max(a, 1e-300 + std::abs(b)));
  }
}

TEST_CASE("commutator sign: -[S,A]u equals the averaged shift") {
  // ((SA - AS) u)_k per axis, computed directly from the operator definitions.
  std::mt19937_64 rng(5);
  const auto u = random_seq(rng, 1, 5, 0.6);
  const auto au = op_momentum(u)[0];
  const auto su = op_position(u)[0];
  const auto sau = op_position(au)[0];
  const auto asu = op_momentum(su)[0];
  for (int k = -6; k <= 6; ++k) {
    const cplx neg_comm = -(sau.at({k, 0, 0}) - asu.at({k, 0, 0}));
    const cplx avg = 0.5 * (u.at({k + 1, 0, 0}) + u.at({k - 1, 0, 0}));
    CHECK(std::abs(neg_comm - avg) < 1e-13);
  }
}

TEST_CASE("main inequality") {
  // delta at the origin: degenerate, ratio 0.
  const auto r0 = uncertainty_main(delta(1, 2, 1.0, {0, 0, 0}));
  CHECK(lhs_commutator_form(delta(1, 2, 1.0, {0, 0, 0})) == 0.0);
  CHECK(r0.pos_factor == 0.0);
  CHECK(r0.ratio == 0.0);
  CHECK(r0.degenerate);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_seq(rng, 1 + trial % 2, 1 + trial % 6, 0.1 + 0.02 * trial);
    const auto r = uncertainty_main(u);
    CHECK(r.ratio <= 1.0 + 1e-9);
    CHECK(r.ratio > 0.0);
  }

  // Equality for the Bessel profile (oracle from std::cyl_bessel_i).
  const auto r = uncertainty_main(bessel_profile(1.0, 1.0, 40));
  CHECK(std::abs(r.ratio - 1.0) < 1e-9);
  CHECK(r.equality);

  CHECK_THROWS_AS(uncertainty_main(LatticeSeq(1, 3, 1.0)), DegenerateInput);
}

TEST_CASE("second inequality") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_seq(rng, 1, 1 + trial % 7, 0.1 + 0.02 * trial);
    CHECK(uncertainty_second(u).ratio <= 1.0 + 1e-9);
  }
  LatticeSeq even(1, 3, 0.5, {0.3, -1.0, 2.0, 4.0, 2.0, -1.0, 0.3});
  CHECK(std::abs(second_normalization_quantity(even)) < 1e-15);
  CHECK(uncertainty_second(even).lhs < 1e-15);

  // omega_k = i^{-k} I_k(1/(alpha h)) / I_0, from std::cyl_bessel_i.
  LatticeSeq w(1, 40, 1.0);
  const double i0 = std::cyl_bessel_i(0.0, 1.0);
  for (int k = -40; k <= 40; ++k) {
    const cplx phase = std::pow(cplx{0.0, -1.0}, k);
    w[{k, 0, 0}] = phase * std::cyl_bessel_i(static_cast<double>(std::abs(k)), 1.0) / i0;
  }
  const auto r = uncertainty_second(w);
  CHECK(std::abs(r.ratio - 1.0) < 1e-9);
  CHECK(r.equality);

  CHECK_THROWS_AS(uncertainty_second(LatticeSeq(2, 1, 1.0)), UnsupportedDimension);
}

TEST_CASE("normalization quantity") {
  CHECK(normalization_quantity(delta(1, 2, 1.0, {0, 0, 0})) == 0.0);
  auto u = delta(1, 2, 1.0, {0, 0, 0});
  u[{1, 0, 0}] = 1.0;
  CHECK(normalization_quantity(u) == 1.0);
  auto v = delta(1, 2, 0.5, {0, 0, 0});
  v[{1, 0, 0}] = 1.0;
  CHECK(normalization_quantity(v) == 0.5);
  CHECK(normalization_quantity(bessel_profile(1.0, 1.0, 20)) > 0.0);
}

TEST_CASE("tail bound") {
  const double z = 1.0;
  double direct = 0.0;
  const double i0 = std::cyl_bessel_i(0.0, z);
  for (int k = 6; k < 60; ++k) direct += 2.0 * std::pow(std::cyl_bessel_i(k, z) / i0, 2);
  CHECK(std::abs(bessel_tail(z, 5) - direct) < 1e-14 * direct + 1e-300);
  for (double zz : {0.5, 1.0, 4.0, 100.0, 400.0}) {
    const int n = minimal_radius(zz, kTailTolerance);
    CHECK(bessel_tail(zz, n) < kTailTolerance);
    if (n > 0) CHECK(bessel_tail(zz, n - 1) >= kTailTolerance);
  }
  CHECK(bessel_tail(1.0, 40) < 1e-13);
}

TEST_CASE("density: perturbing one site makes the normalization quantity nonzero") {
  std::mt19937_64 rng(23);
  std::vector<LatticeSeq> cases;
  cases.push_back(delta(1, 2, 1.0, {0, 0, 0}));
  cases.push_back(delta(2, 2, 0.5, {1, -1, 0}, {0.0, 2.0}));
  cases.push_back(delta(3, 1, 0.3, {0, 0, 1}, {1.0, -1.0}));
  // u_0 = 1, u_1 = i: Re(u_0 conj u_1) = 0.
  LatticeSeq u(1, 1, 0.8, {0.0, 1.0, cplx{0.0, 1.0}});
  cases.push_back(u);
  for (const auto& c : cases) {
    REQUIRE(normalization_quantity(c) == 0.0);
    for (double eps : {1e-1, 1e-6}) {
      const auto w = perturb_to_nondegenerate(c, eps);
      CHECK(normalization_quantity(w) != 0.0);
      CHECK(norm(difference(c, w)) <= eps * (1.0 + 1e-12));
    }
  }
  CHECK_THROWS_AS(perturb_to_nondegenerate(LatticeSeq(1, 1, 1.0), 0.1), DegenerateInput);
}
