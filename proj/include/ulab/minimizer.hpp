#pragma once

// Minimizing sequences of the two lattice uncertainty inequalities, their
// Fourier-side profile and the pointwise convergence to the Gaussian.

#include <vector>

#include "ulab/lattice.hpp"

namespace ulab {

enum class NormMode {
  CenterOne,   // omega_0 = 1
  UnitL2,      // h^d sum |omega_k|^2 = 1
  Commutator2  // nearest-neighbour correlation equal to 2
};

struct MinimizerSpec {
  double alpha = 1.0;
  double h = 1.0;
  int d = 1;
  NormMode norm = NormMode::CenterOne;
};

/// Throws InvalidArgument unless alpha > 0, h > 0 (finite) and 1 <= d <= 3.
void validate(const MinimizerSpec& spec);

/// 1 / (alpha h^2), the Bessel argument of the main minimizer.
double main_argument(const MinimizerSpec& spec);
/// 1 / (alpha h), the Bessel argument of the second-relation minimizer.
double second_argument(const MinimizerSpec& spec);

/// Smallest radius whose truncation loses less than kTailTolerance of the
/// l^2 mass (relative) for the main / second minimizer.
int recommended_radius(const MinimizerSpec& spec);
int recommended_radius_second(const MinimizerSpec& spec);

/// omega_k = prod_j I_{k_j}(z) / I_0(z), z = 1/(alpha h^2), on [-N, N]^d,
/// then rescaled per spec.norm. Throws TruncationError when the radius
/// loses kTailTolerance or more of the mass.
LatticeSeq minimizer_main(const MinimizerSpec& spec, int N);

/// omega_k = i^{-k} I_k(1/(alpha h)) / I_0(1/(alpha h)) (d = 1), rescaled
/// per spec.norm; Commutator2 fixes |h^2 sum (w_{k+1}-w_{k-1})/2 conj w_k| = 2.
LatticeSeq minimizer_second(const MinimizerSpec& spec, int N);

/// max over interior k and axes j of
/// |alpha k_j h w_k + (w_{k+e_j} - w_{k-e_j})/2h| / (sum of the three term magnitudes).
double main_recurrence_residual(const LatticeSeq& w, double alpha);
/// Same for alpha k h w_k + i (w_{k+1} + w_{k-1}) / 2 (d = 1).
double second_recurrence_residual(const LatticeSeq& w, double alpha);

/// f(x) = C exp(sum_j cos(x_j h) / (alpha h^2)) on [-pi/h, pi/h]^d, with C
/// chosen so that its Fourier coefficients int f e^{-i x.k h} dx are the
/// infinite-lattice minimizer in the normalization of `spec`.
double periodic_profile(const MinimizerSpec& spec, const std::vector<double>& x);

/// log C for which the profile has unit L^2[-pi/h, pi/h]^d norm, computed
/// by quadrature of e^{2 cos(xh)/(alpha h^2)}.
double profile_l2_log_constant(const MinimizerSpec& spec);

struct ConvergencePoint {
  std::vector<double> x;
  int j = 1;
  double f_j_value = 1.0;
  double gauss_value = 1.0;
  double error = 0.0;
};

/// Lattice index used for coordinate x_m at resolution j: ceil(x_m / h_j)
/// for x_m >= 0 and floor(x_m / h_j) otherwise, h_j = max|x_i| / j.
std::vector<int> convergence_indices(const std::vector<double>& x, int j);

/// f_j(x) = prod_m I_{|k_m|}(1/h_j^2) / I_0(1/h_j^2) against e^{-|x|^2/2}.
ConvergencePoint gaussian_convergence(const std::vector<double>& x, int j);

}  // namespace ulab
