#include "ulab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulab/bessel.hpp"
#include "ulab/errors.hpp"

namespace ulab {
namespace {

void require_compatible(const LatticeSeq& a, const LatticeSeq& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("lattice: dimension mismatch");
  if (a.mesh() != b.mesh()) throw InvalidArgument("lattice: mesh mismatch");
}

// Calls f(k, u_k) for every site of the box.
template <class F>
void for_each_site(const LatticeSeq& u, F&& f) {
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) f(u.index_of(i), vals[i]);
}

double sum_sq(const LatticeSeq& u) {
  double s = 0.0;
  for (const cplx& v : u.values()) s += std::norm(v);
  return s;
}

// sum_k sum_j u_{k+e_j} conj(u_k), unweighted.
cplx forward_overlap(const LatticeSeq& u) {
  cplx s{0.0, 0.0};
  for_each_site(u, [&](const Index& k, cplx v) {
    for (int j = 0; j < u.dim(); ++j) s += u.at(k + unit(j)) * std::conj(v);
  });
  return s;
}

UncertaintyReport make_report(double lhs, double pos, double mom) {
  UncertaintyReport r;
  r.lhs = lhs;
  r.pos_factor = pos;
  r.mom_factor = mom;
  const double denom = 2.0 * pos * mom;
  if (denom == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.ratio = lhs / denom;
  r.equality = std::abs(r.ratio - 1.0) <= kEqualityTolerance;
  return r;
}

void require_nonzero(const LatticeSeq& u) {
  for (const cplx& v : u.values())
    if (v != cplx{0.0, 0.0}) return;
  throw DegenerateInput("lattice: sequence is identically zero");
}

}  // namespace

LatticeSeq::LatticeSeq(int d, int N, double h) : d_(d), n_(N), h_(h) {
  if (d < 1 || d > 3) throw UnsupportedDimension("lattice: d must be 1, 2 or 3, got " + std::to_string(d));
  if (N < 0) throw InvalidArgument("lattice: box radius must be >= 0");
  if (!std::isfinite(h) || h <= 0.0) throw InvalidArgument("lattice: mesh h must be finite and > 0");
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(2 * N + 1);
  values_.assign(n, cplx{0.0, 0.0});
}

LatticeSeq::LatticeSeq(int d, int N, double h, std::vector<cplx> values) : LatticeSeq(d, N, h) {
  if (values.size() != values_.size())
    throw InvalidArgument("lattice: expected " + std::to_string(values_.size()) + " values, got " +
                          std::to_string(values.size()));
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("lattice: non-finite value");
  values_ = std::move(values);
}

double LatticeSeq::cell() const noexcept { return std::pow(h_, d_); }

bool LatticeSeq::contains(const Index& k) const noexcept {
  for (int j = 0; j < 3; ++j) {
    const int kj = k[static_cast<std::size_t>(j)];
    if (j < d_ ? (kj < -n_ || kj > n_) : kj != 0) return false;
  }
  return true;
}

std::size_t LatticeSeq::linear(const Index& k) const noexcept {
  std::size_t i = 0;
  const auto s = static_cast<std::size_t>(side());
  for (int j = 0; j < d_; ++j) i = i * s + static_cast<std::size_t>(k[static_cast<std::size_t>(j)] + n_);
  return i;
}

Index LatticeSeq::index_of(std::size_t i) const noexcept {
  Index k{0, 0, 0};
  const auto s = static_cast<std::size_t>(side());
  for (int j = d_ - 1; j >= 0; --j) {
    k[static_cast<std::size_t>(j)] = static_cast<int>(i % s) - n_;
    i /= s;
  }
  return k;
}

LatticeSeq LatticeSeq::padded(int new_radius) const {
  if (new_radius < n_) throw InvalidArgument("lattice: padded radius smaller than current radius");
  LatticeSeq out(d_, new_radius, h_);
  for_each_site(*this, [&](const Index& k, cplx v) { out[k] = v; });
  return out;
}

LatticeSeq LatticeSeq::cropped(int new_radius) const {
  if (new_radius < 0) throw InvalidArgument("lattice: negative radius");
  LatticeSeq out(d_, new_radius, h_);
  for_each_site(out, [&](const Index& k, cplx) { out[k] = at(k); });
  return out;
}

LatticeSeq& LatticeSeq::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

LatticeSeq add(const LatticeSeq& a, const LatticeSeq& b) {
  require_compatible(a, b);
  LatticeSeq out(a.dim(), std::max(a.radius(), b.radius()), a.mesh());
  for_each_site(out, [&](const Index& k, cplx) { out[k] = a.at(k) + b.at(k); });
  return out;
}

LatticeSeq difference(const LatticeSeq& a, const LatticeSeq& b) {
  require_compatible(a, b);
  LatticeSeq out(a.dim(), std::max(a.radius(), b.radius()), a.mesh());
  for_each_site(out, [&](const Index& k, cplx) { out[k] = a.at(k) - b.at(k); });
  return out;
}

cplx inner(const LatticeSeq& u, const LatticeSeq& v) {
  require_compatible(u, v);
  cplx s{0.0, 0.0};
  for_each_site(u, [&](const Index& k, cplx x) { s += x * std::conj(v.at(k)); });
  return u.cell() * s;
}

double norm(const LatticeSeq& u) { return std::sqrt(u.cell() * sum_sq(u)); }

double norm(const VectorSeq& u) {
  double s = 0.0;
  for (const auto& c : u) s += c.cell() * sum_sq(c);
  return std::sqrt(s);
}

double sup_norm(const LatticeSeq& u) {
  double m = 0.0;
  for (const cplx& v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

VectorSeq op_position(const LatticeSeq& u) {
  VectorSeq out;
  for (int j = 0; j < u.dim(); ++j) {
    LatticeSeq c(u.dim(), u.radius(), u.mesh());
    for_each_site(u, [&](const Index& k, cplx v) { c[k] = (k[static_cast<std::size_t>(j)] * u.mesh()) * v; });
    out.push_back(std::move(c));
  }
  return out;
}

VectorSeq op_momentum(const LatticeSeq& u) {
  VectorSeq out;
  const double inv = 1.0 / (2.0 * u.mesh());
  for (int j = 0; j < u.dim(); ++j) {
    LatticeSeq c(u.dim(), u.radius() + 1, u.mesh());
    const Index e = unit(j);
    for_each_site(c, [&](const Index& k, cplx) { c[k] = (u.at(k + e) - u.at(k - e)) * inv; });
    out.push_back(std::move(c));
  }
  return out;
}

LatticeSeq forward_difference(const LatticeSeq& u, int axis) {
  if (axis < 0 || axis >= u.dim()) throw InvalidArgument("lattice: axis out of range");
  LatticeSeq c(u.dim(), u.radius() + 1, u.mesh());
  const Index e = unit(axis);
  const double inv = 1.0 / u.mesh();
  for_each_site(c, [&](const Index& k, cplx) { c[k] = (u.at(k + e) - u.at(k)) * inv; });
  return c;
}

LatticeSeq op_laplacian(const LatticeSeq& u) {
  LatticeSeq c(u.dim(), u.radius() + 1, u.mesh());
  const double inv = 1.0 / (u.mesh() * u.mesh());
  for_each_site(c, [&](const Index& k, cplx) {
    cplx s{0.0, 0.0};
    for (int j = 0; j < u.dim(); ++j) s += u.at(k + unit(j)) - 2.0 * u.at(k) + u.at(k - unit(j));
    c[k] = s * inv;
  });
  return c;
}

double lhs_commutator_form(const LatticeSeq& u) {
  // sum_k (u_{k+e} + u_{k-e})/2 conj(u_k) = Re sum_k u_{k+e} conj(u_k) summed over both shifts.
  cplx s{0.0, 0.0};
  for_each_site(u, [&](const Index& k, cplx v) {
    for (int j = 0; j < u.dim(); ++j) s += 0.5 * (u.at(k + unit(j)) + u.at(k - unit(j))) * std::conj(v);
  });
  return std::abs(u.cell() * s);
}

double lhs_difference_form(const LatticeSeq& u) {
  double grad = 0.0;
  for (int j = 0; j < u.dim(); ++j) grad += sum_sq(forward_difference(u, j));
  const double h = u.mesh();
  return std::abs(u.cell() * (u.dim() * sum_sq(u) - 0.5 * h * h * grad));
}

UncertaintyReport uncertainty_main(const LatticeSeq& u) {
  require_nonzero(u);
  return make_report(lhs_difference_form(u), norm(op_position(u)), norm(op_momentum(u)));
}

cplx second_normalization_quantity(const LatticeSeq& u) {
  if (u.dim() != 1) throw UnsupportedDimension("second relation is defined for d = 1 only");
  cplx s{0.0, 0.0};
  for (int k = -u.radius(); k <= u.radius(); ++k)
    s += 0.5 * (u.at({k + 1, 0, 0}) - u.at({k - 1, 0, 0})) * std::conj(u.at({k, 0, 0}));
  return u.mesh() * u.mesh() * s;
}

UncertaintyReport uncertainty_second(const LatticeSeq& u) {
  if (u.dim() != 1) throw UnsupportedDimension("second relation is defined for d = 1 only");
  require_nonzero(u);
  const double h = u.mesh();
  double mom = 0.0;
  for (int k = -u.radius() - 1; k <= u.radius() + 1; ++k)
    mom += std::norm(0.5 * (u.at({k + 1, 0, 0}) + u.at({k - 1, 0, 0})));
  return make_report(std::abs(second_normalization_quantity(u)), norm(op_position(u)), std::sqrt(h * mom));
}

double normalization_quantity(const LatticeSeq& u) {
  // Re sum u_k conj(u_{k+e}) = Re sum u_{k+e} conj(u_k).
  return u.cell() * forward_overlap(u).real();
}

double bessel_tail(double z, int N) {
  if (!std::isfinite(z) || z <= 0.0) throw InvalidArgument("bessel_tail: z must be finite and > 0");
  if (N < 0) throw InvalidArgument("bessel_tail: N must be >= 0");
  // Orders beyond this are below e^{-40} relative (see miller_start_order).
  const int top = bessel::miller_start_order(cplx{z, 0.0}, N) - 10;
  const auto r = bessel::i_ratios(cplx{z, 0.0}, top);
  double tail = 0.0;
  for (int k = top; k > N; --k) tail += std::norm(r[static_cast<std::size_t>(k)]);
  return 2.0 * tail;
}

int minimal_radius(double z, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("minimal_radius: tolerance must be > 0");
  if (!std::isfinite(z) || z <= 0.0) throw InvalidArgument("minimal_radius: z must be finite and > 0");
  const int top = bessel::miller_start_order(cplx{z, 0.0}, 0);
  const auto r = bessel::i_ratios(cplx{z, 0.0}, top);
  // tail(N) = 2 sum_{k>N} r_k^2, accumulated from the top down.
  double tail = 0.0;
  for (int N = top; N >= 0; --N) {
    if (2.0 * tail >= tol) return N + 1;
    tail += std::norm(r[static_cast<std::size_t>(N)]);
  }
  return 0;
}

LatticeSeq perturb_to_nondegenerate(const LatticeSeq& u, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("perturbation size must be finite and > 0");
  require_nonzero(u);
  if (normalization_quantity(u) != 0.0) return u;

  // Site k with u_k != 0 and maximal first coordinate; m = k + e_1 lies
  // outside the support, so the new quantity is Re(delta conj u_k) h^d plus
  // pairs of delta with other neighbours of m. Those other neighbours all
  // have first coordinate m_1 (ignoring m - e_1 = k), which exceeds the
  // maximal first coordinate of the support, so they vanish.
  Index k{0, 0, 0};
  bool found = false;
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == cplx{0.0, 0.0}) continue;
    const Index c = u.index_of(i);
    if (!found || c[0] > k[0]) k = c, found = true;
  }
  const Index m = k + unit(0);
  LatticeSeq out = u.padded(u.radius() + 1);
  const cplx s = u.at(k);
  // ||delta||_2 = h^{d/2} |delta| = eps.
  out[m] = (eps / std::sqrt(u.cell())) * (s / std::abs(s));
  return out;
}

}  // namespace ulab
