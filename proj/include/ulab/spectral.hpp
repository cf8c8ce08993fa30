#pragma once

// Periodic embedding of lattice sequences and Fourier multipliers on a
// padded grid, backed by FFTW.

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ulab/lattice.hpp"

namespace ulab::spectral {

/// Unnormalized d-dimensional complex DFT on an M^d grid (row-major,
/// first axis slowest). forward uses e^{-i theta n}, backward e^{+i theta n}.
class Transform {
 public:
  Transform(int d, int M);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  int dim() const noexcept { return d_; }
  int points() const noexcept { return m_; }
  std::span<cplx> data() noexcept;
  std::span<const cplx> data() const noexcept;

  void forward();
  void backward();

 private:
  struct Plans;
  int d_;
  int m_;
  std::unique_ptr<Plans> plans_;
};

/// Number of orders m beyond which |J_m(y)| < 1e-18 for all larger m,
/// i.e. the spread of a Bessel kernel with argument y.
int kernel_margin(double y);

/// Smallest even grid size with M >= 4(2N+1) and M >= R + N + spread + 1, so
/// that wrap-around images of a kernel of the given spread miss the output box.
int grid_size(int N, int R, int spread);

/// Writes u into the grid (site k goes to k mod M per axis).
void embed(const LatticeSeq& u, Transform& grid);
/// Reads the box of radius R from the grid, dividing by M^d.
LatticeSeq extract(const Transform& grid, int d, int R, double h);

/// Frequency of grid index n: theta = 2 pi n / M.
double frequency(int n, int M);

/// Applies the multiplier prod_j factor(theta_j) to u and returns the box of
/// radius R. spread bounds the support of the multiplier's kernel.
LatticeSeq apply_separable(const LatticeSeq& u, int R, int spread, const std::function<cplx(double)>& factor);

}  // namespace ulab::spectral
