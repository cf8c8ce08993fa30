#pragma once

// Uncertainty relations for finite sequences u_{-N}, ..., u_N in one
// dimension: a DFT-compatible variant with sine positions, a periodic
// truncation, and a Dirichlet truncation with u_{-N} = u_N = 0.
//
// Sequences are Eigen vectors of length 2N+1, entry i holding u_{i-N}.
// Norms carry the mesh weight: ||u||^2 = h sum |u_k|^2.

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ulab/lattice.hpp"

namespace ulab {

enum class FiniteVariant { DFT, Periodic, Dirichlet };

/// Position weights of the DFT variant:
///   Uncertainty  q_k = ((2N+1)h / 2pi) sin(2pi k / (2N+1)),
///   Limit        q_k = (N h / pi) sin(pi k / N).
/// The other variants always use q_k = k h.
enum class PositionWeights { Uncertainty, Limit };

struct LaplacianSpectrum;

struct FiniteCase {
  FiniteVariant variant = FiniteVariant::DFT;
  int N = 0;
  double h = 1.0;
  double alpha = 1.0;
  Eigen::VectorXd q;  // diagonal of S
  Eigen::MatrixXd S;  // diag(q)
  Eigen::MatrixXd A;  // skew-symmetric; cyclic central difference / 2h
  Eigen::MatrixXd L;  // discrete Laplacian of the matching Schrodinger equation

  int size() const noexcept { return 2 * N + 1; }

  // Eigendecomposition of L, built on first use and shared by copies.
  std::shared_ptr<LaplacianSpectrum> spectrum;
};

/// Throws TooSmall for N < 2, InvalidArgument for h <= 0 or alpha <= 0.
/// Dirichlet: first and last rows and columns of A and L are zero.
FiniteCase build_case(FiniteVariant variant, int N, double h, double alpha,
                      PositionWeights weights = PositionWeights::Uncertainty);

/// <-[S, A] u, u> = sum_k (q_{k+1} - q_k) Re(u_{k+1} conj u_k), the sum
/// cyclic for DFT and Periodic and over k = -N..N-1 for Dirichlet.
double commutator_form(const FiniteCase& c, const Eigen::VectorXcd& u);
/// h u^* (-(SA - AS)) u.
double commutator_form_matrix(const FiniteCase& c, const Eigen::VectorXcd& u);

/// ||S u||, ||A u|| and |<-[S,A]u,u>| with ratio lhs / (2 ||Su|| ||Au||).
/// For DFT, ||A u|| is also computed from the unitary DFT and must agree to
/// 1e-10 relative (NumericalError otherwise).
UncertaintyReport uncertainty_finite(const FiniteCase& c, const Eigen::VectorXcd& u);

/// sqrt(h sum_n sin^2(2 pi n / (2N+1)) / h^2 |u^_n|^2) with the unitary DFT.
/// DFT and Periodic variants only (they share A).
double dft_momentum_norm(const FiniteCase& c, const Eigen::VectorXcd& u);

/// max_n ||A f_n - (i sin(theta_n) / h) f_n|| over the unit Fourier vectors
/// f_n, theta_n = 2 pi n / (2N+1). DFT and Periodic variants only.
double circulant_residual(const FiniteCase& c);

enum class MinimizerMethod { LinearSolve, ContinuedFraction };

struct FiniteMinimizer {
  FiniteCase finite_case;
  Eigen::VectorXd values;  // omega_{-N}..omega_N with omega_0 = 1
  MinimizerMethod method = MinimizerMethod::LinearSolve;
  std::vector<double> singular_values;  // LinearSolve only, descending
};

/// Singular values at or below this fraction of the largest count as kernel.
inline constexpr double kKernelTolerance = 1e-12;

/// Kernel of alpha S + A, normalized to omega_0 = 1.
/// LinearSolve: smallest right singular vector (on the interior for
/// Dirichlet); throws AmbiguousMinimizer unless the kernel has dimension 1.
/// ContinuedFraction: omega_k = omega_{k-1} / [a_k, ..., a_{N-1}, a_N'] with
///   Dirichlet  a_m = 2 m alpha h^2 (no terminal term),
///   DFT        a_m = 2 alpha h q_m, a_N' = 1 + 2 alpha h q_N;
/// not available for Periodic (InvalidArgument).
FiniteMinimizer solve_minimizer(const FiniteCase& c, MinimizerMethod method);

/// ||(alpha S + A) omega|| / ||omega||.
double minimizer_residual(const FiniteMinimizer& m);

struct CfLimitRow {
  int N = 0;
  double value = 0.0;  // [2k alpha h^2, ..., 2(N-1) alpha h^2]
  double error = 0.0;  // |value - I_{k-1}(z) / I_k(z)|, z = 1/(alpha h^2)
};

struct CfLimitTable {
  int k = 1;
  double limit = 0.0;
  std::vector<CfLimitRow> rows;
};

/// Continued fractions of the Dirichlet minimizer against their N -> infinity
/// limit. Requires k >= 1 and every N > k.
CfLimitTable dirichlet_cf_limit(int k, double alpha, double h, const std::vector<int>& N_list);

/// ((-1)^{N+k} K_{k-1} I_N + I_{k-1} K_N) / ((-1)^{N+k+1} K_k I_N + I_k K_N)
/// at z = 1/(alpha h^2): the closed form of the same fraction. Requires
/// 1 <= k < N <= 60.
double dirichlet_cf_closed_form(int k, int N, double alpha, double h);

/// (f_j^L(x), e^{L^2 (cos(pi x / L) - 1) / pi^2}) where f_j^L(x) is
/// omega_{sign(x) j} of the DFT minimizer (alpha = 1, Limit weights) with
/// N = ceil(j L / |x|) and h = |x| / j. x = 0 gives (1, 1).
/// Requires L > 0, |x| <= L, j >= 1; throws TooSmall when N < 2.
std::pair<double, double> dft_limit_profile(double x, double L, int j);

/// e^{itL} u0, by the cached eigendecomposition of L.
Eigen::VectorXcd finite_evolve(const FiniteCase& c, const Eigen::VectorXcd& u0, double t);

struct FiniteVirial {
  double F = 0.0;       // h sum (kh)^2 |u_k(t)|^2
  double Fdot = 0.0;
  double Fddot = 0.0;
  double Fdddot = 0.0;
};

/// F and its first three time derivatives at time t along u' = i L u, each
/// derivative evaluated exactly as <C_n u(t), u(t)> with
/// C_0 = diag(h (kh)^2), C_{n+1} = i (C_n L - L C_n).
FiniteVirial finite_virial(const FiniteCase& c, const Eigen::VectorXcd& u0, double t);

struct FiniteCounterexample {
  FiniteVariant variant;
  int N;
  std::vector<double> u0;
  double fddot0;  // exact F''(0) at h = 1
};

/// Data whose F''(0) has opposite signs within each truncated variant:
/// periodic 8 and -12, Dirichlet -12 and 4 (N = 3, h = 1).
const std::vector<FiniteCounterexample>& finite_counterexamples();

}  // namespace ulab
