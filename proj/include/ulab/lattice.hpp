#pragma once

// Finitely supported sequences on boxes of Z^d (d <= 3) with mesh h, the
// discrete position/momentum/Laplacian operators and the two lattice
// uncertainty inequalities.
//
// Inner product: <u, v> = h^d sum_k u_k conj(v_k).

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ulab {

using cplx = std::complex<double>;

/// Lattice multi-index; components past the sequence dimension are zero.
using Index = std::array<int, 3>;

inline Index unit(int axis) {
  Index e{0, 0, 0};
  e[static_cast<std::size_t>(axis)] = 1;
  return e;
}
inline Index operator+(Index a, const Index& b) {
  for (std::size_t i = 0; i < 3; ++i) a[i] += b[i];
  return a;
}
inline Index operator-(Index a, const Index& b) {
  for (std::size_t i = 0; i < 3; ++i) a[i] -= b[i];
  return a;
}

/// Complex sequence supported in the box [-N, N]^d, stored row-major with
/// the first index varying slowest. Reads outside the box return 0.
class LatticeSeq {
 public:
  LatticeSeq(int d, int N, double h);
  LatticeSeq(int d, int N, double h, std::vector<cplx> values);

  int dim() const noexcept { return d_; }
  int radius() const noexcept { return n_; }
  double mesh() const noexcept { return h_; }
  int side() const noexcept { return 2 * n_ + 1; }
  std::size_t size() const noexcept { return values_.size(); }
  /// h^d, the weight of one lattice site in inner products.
  double cell() const noexcept;

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  bool contains(const Index& k) const noexcept;
  cplx at(const Index& k) const noexcept { return contains(k) ? values_[linear(k)] : cplx{0.0, 0.0}; }
  /// k must lie in the box.
  cplx& operator[](const Index& k) { return values_[linear(k)]; }
  const cplx& operator[](const Index& k) const { return values_[linear(k)]; }

  std::size_t linear(const Index& k) const noexcept;
  Index index_of(std::size_t linear) const noexcept;

  /// Same sequence on a box of radius new_radius >= radius().
  LatticeSeq padded(int new_radius) const;
  /// Restriction to a smaller box (drops values outside it).
  LatticeSeq cropped(int new_radius) const;

  LatticeSeq& operator*=(cplx s);
  friend LatticeSeq operator*(cplx s, LatticeSeq u) { return u *= s; }

 private:
  int d_;
  int n_;
  double h_;
  std::vector<cplx> values_;
};

/// Vector-valued sequence, one LatticeSeq per axis.
using VectorSeq = std::vector<LatticeSeq>;

/// Pointwise sum and difference on the union of both boxes.
LatticeSeq add(const LatticeSeq& a, const LatticeSeq& b);
LatticeSeq difference(const LatticeSeq& a, const LatticeSeq& b);

cplx inner(const LatticeSeq& u, const LatticeSeq& v);
double norm(const LatticeSeq& u);
double norm(const VectorSeq& u);
double sup_norm(const LatticeSeq& u);

/// (S_h u)_k = k h u_k, one component per axis.
VectorSeq op_position(const LatticeSeq& u);
/// (A_h u)_k = (u_{k+e_j} - u_{k-e_j}) / (2h); support grows by one.
VectorSeq op_momentum(const LatticeSeq& u);
/// (d_j^+ u)_k = (u_{k+e_j} - u_k) / h on the box grown by one.
LatticeSeq forward_difference(const LatticeSeq& u, int axis);
/// Delta_d u = sum_j (u_{k+e_j} - 2 u_k + u_{k-e_j}) / h^2; support grows by one.
LatticeSeq op_laplacian(const LatticeSeq& u);

struct UncertaintyReport {
  double lhs = 0.0;
  double pos_factor = 0.0;
  double mom_factor = 0.0;
  double ratio = 0.0;  // lhs / (2 pos mom), or 0 when that product vanishes
  bool equality = false;
  bool degenerate = false;  // pos * mom == 0
};

/// Tolerance on |ratio - 1| for the equality flag.
inline constexpr double kEqualityTolerance = 1e-9;

/// |<-[S_h, A_h] u, u>| = |h^d sum_k sum_j (u_{k+e_j} + u_{k-e_j})/2 conj(u_k)|.
double lhs_commutator_form(const LatticeSeq& u);
/// |d h^d sum |u_k|^2 - (h^2/2) h^d sum_k sum_j |d_j^+ u_k|^2|, the same
/// quantity rewritten without the commutator.
double lhs_difference_form(const LatticeSeq& u);

/// First lattice inequality |<-[S,A]u,u>| <= 2 ||S u|| ||A u||.
UncertaintyReport uncertainty_main(const LatticeSeq& u);

/// Second relation (d = 1) with S u = k h u and A u = i (u_{k+1} + u_{k-1}) / 2:
/// |h^2 sum (u_{k+1} - u_{k-1})/2 conj(u_k)| <= 2 ||k h u|| ||(u_{k+1}+u_{k-1})/2||.
UncertaintyReport uncertainty_second(const LatticeSeq& u);

/// Re h^d sum_k sum_j u_k conj(u_{k+e_j}). Must be nonzero (and is rescaled
/// to 2) before the lattice Virial parabola applies.
double normalization_quantity(const LatticeSeq& u);

/// h^2 sum_k (u_{k+1} - u_{k-1})/2 conj(u_k) (d = 1); purely imaginary.
cplx second_normalization_quantity(const LatticeSeq& u);

/// sum_{|k|>N} |I_k(z) / I_0(z)|^2, the l^2 mass a one-axis Bessel profile
/// loses when truncated to [-N, N].
double bessel_tail(double z, int N);
/// Smallest N with bessel_tail(z, N) < tol.
int minimal_radius(double z, double tol);

inline constexpr double kTailTolerance = 1e-13;

/// Adds a perturbation of l^2 size eps at one site so that the
/// normalization quantity becomes nonzero. u must be nonzero.
LatticeSeq perturb_to_nondegenerate(const LatticeSeq& u, double eps);

}  // namespace ulab
