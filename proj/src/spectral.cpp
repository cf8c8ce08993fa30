#include "ulab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ulab/bessel.hpp"
#include "ulab/errors.hpp"

namespace ulab::spectral {
namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Transform::Plans {
  fftw_complex* buf = nullptr;
  std::size_t n = 0;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Transform::Transform(int d, int M) : d_(d), m_(M), plans_(std::make_unique<Plans>()) {
  if (d < 1 || d > 3) throw UnsupportedDimension("spectral: d must be 1, 2 or 3");
  if (M < 1) throw InvalidArgument("spectral: grid size must be >= 1");
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(M);
  plans_->n = n;
  std::lock_guard lock(planner_mutex());
  plans_->buf = fftw_alloc_complex(n);
  if (plans_->buf == nullptr) throw std::bad_alloc();
  const int dims[3] = {M, M, M};
  plans_->fwd = fftw_plan_dft(d, dims, plans_->buf, plans_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft(d, dims, plans_->buf, plans_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  std::fill_n(reinterpret_cast<double*>(plans_->buf), 2 * n, 0.0);
}

Transform::~Transform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  fftw_free(plans_->buf);
}

std::span<cplx> Transform::data() noexcept {
  return {reinterpret_cast<cplx*>(plans_->buf), plans_->n};
}

std::span<const cplx> Transform::data() const noexcept {
  return {reinterpret_cast<const cplx*>(plans_->buf), plans_->n};
}

void Transform::forward() { fftw_execute(plans_->fwd); }
void Transform::backward() { fftw_execute(plans_->bwd); }

int kernel_margin(double y) {
  if (!std::isfinite(y)) throw InvalidArgument("kernel_margin: non-finite argument");
  y = std::abs(y);
  if (y == 0.0) return 0;
  // Past m ~ y + 10 y^{1/3} + 40, J_m(y) is far below 1e-18.
  if (y > 1e7) throw Overflow("kernel_margin: time too large for a finite kernel");
  const int top = static_cast<int>(std::ceil(y + 10.0 * std::cbrt(y) + 40.0));
  const auto v = bessel::i_family_scaled(cplx{0.0, y}, top);
  int last = 0;
  for (int m = 0; m <= top; ++m)
    if (std::abs(v[static_cast<std::size_t>(m)]) >= 1e-18) last = m;
  return last;
}

int grid_size(int N, int R, int spread) {
  int m = std::max({4 * (2 * N + 1), R + N + spread + 1, 2 * R + 1});
  return m + (m % 2);
}

void embed(const LatticeSeq& u, Transform& grid) {
  const int M = grid.points();
  if (2 * u.radius() + 1 > M) throw InvalidArgument("spectral: grid smaller than the sequence box");
  auto data = grid.data();
  std::fill(data.begin(), data.end(), cplx{0.0, 0.0});
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = u.index_of(i);
    std::size_t pos = 0;
    for (int j = 0; j < u.dim(); ++j) pos = pos * M + static_cast<std::size_t>((k[j] % M + M) % M);
    data[pos] = vals[i];
  }
}

LatticeSeq extract(const Transform& grid, int d, int R, double h) {
  const int M = grid.points();
  if (2 * R + 1 > M) throw InvalidArgument("spectral: output box larger than the grid");
  LatticeSeq out(d, R, h);
  const double inv = 1.0 / std::pow(static_cast<double>(M), d);
  const auto data = grid.data();
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Index k = out.index_of(i);
    std::size_t pos = 0;
    for (int j = 0; j < d; ++j) pos = pos * M + static_cast<std::size_t>((k[j] % M + M) % M);
    vals[i] = data[pos] * inv;
  }
  return out;
}

double frequency(int n, int M) { return 2.0 * std::numbers::pi * n / M; }

LatticeSeq apply_separable(const LatticeSeq& u, int R, int spread, const std::function<cplx(double)>& factor) {
  const int d = u.dim();
  const int M = grid_size(u.radius(), R, spread);
  Transform grid(d, M);
  embed(u, grid);
  grid.forward();
  std::vector<cplx> f(static_cast<std::size_t>(M));
  for (int n = 0; n < M; ++n) f[static_cast<std::size_t>(n)] = factor(frequency(n, M));
  auto data = grid.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t rest = i;
    cplx m{1.0, 0.0};
    for (int j = 0; j < d; ++j) {
      m *= f[rest % M];
      rest /= M;
    }
    data[i] *= m;
  }
  grid.backward();
  return extract(grid, d, R, u.mesh());
}

}  // namespace ulab::spectral
