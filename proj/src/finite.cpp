#include "ulab/finite.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ulab/bessel.hpp"
#include "ulab/errors.hpp"
#include "ulab/spectral.hpp"

namespace ulab {

struct LaplacianSpectrum {
  std::once_flag once;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

bool cyclic(FiniteVariant v) { return v != FiniteVariant::Dirichlet; }

void require_length(const FiniteCase& c, const VectorXcd& u) {
  if (u.size() != c.size())
    throw InvalidArgument("finite: sequence has length " + std::to_string(u.size()) + ", expected " +
                          std::to_string(c.size()));
  if (!u.allFinite()) throw InvalidArgument("finite: non-finite sequence value");
}

void require_boundary(const FiniteCase& c, const VectorXcd& u) {
  if (c.variant != FiniteVariant::Dirichlet) return;
  const double scale = u.cwiseAbs().maxCoeff();
  const double edge = std::max(std::abs(u(0)), std::abs(u(c.size() - 1)));
  if (edge > 1e-14 * scale)
    throw ConstraintViolation("finite: Dirichlet sequences need u_{-N} = u_N = 0");
}

const LaplacianSpectrum& spectrum(const FiniteCase& c) {
  if (!c.spectrum) throw InvalidArgument("finite: case was not created by build_case");
  std::call_once(c.spectrum->once, [&] {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c.L);
    if (eig.info() != Eigen::Success) throw NumericalError("finite: Laplacian eigendecomposition failed");
    c.spectrum->values = eig.eigenvalues();
    c.spectrum->vectors = eig.eigenvectors();
  });
  return *c.spectrum;
}

double weighted_norm(const FiniteCase& c, const VectorXcd& v) { return std::sqrt(c.h) * v.norm(); }

// Partial quotients of omega_{k-1} / omega_k.
std::vector<double> quotients(const FiniteCase& c, int k) {
  std::vector<double> a;
  if (c.variant == FiniteVariant::Dirichlet) {
    for (int m = k; m <= c.N - 1; ++m) a.push_back(2.0 * m * c.alpha * c.h * c.h);
  } else {
    for (int m = k; m <= c.N - 1; ++m) a.push_back(2.0 * c.alpha * c.h * c.q(m + c.N));
    a.push_back(1.0 + 2.0 * c.alpha * c.h * c.q(2 * c.N));
  }
  return a;
}

}  // namespace

FiniteCase build_case(FiniteVariant variant, int N, double h, double alpha, PositionWeights weights) {
  if (N < 2) throw TooSmall("finite: N must be >= 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("finite: h must be positive and finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("finite: alpha must be positive and finite");
  FiniteCase c;
  c.variant = variant;
  c.N = N;
  c.h = h;
  c.alpha = alpha;
  const int M = 2 * N + 1;
  c.q.resize(M);
  for (int k = -N; k <= N; ++k) {
    double q = k * h;
    if (variant == FiniteVariant::DFT) {
      q = weights == PositionWeights::Uncertainty ? M * h / (2.0 * kPi) * std::sin(2.0 * kPi * k / M)
                                                  : N * h / kPi * std::sin(kPi * k / N);
    }
    c.q(k + N) = q;
  }
  // sin(pi k / N) at k = +-N and sin(2 pi k / M) at k = 0 are exact zeros.
  if (variant == FiniteVariant::DFT) {
    c.q(N) = 0.0;
    if (weights == PositionWeights::Limit) c.q(0) = c.q(2 * N) = 0.0;
    for (int k = 1; k <= N; ++k) c.q(N - k) = -c.q(N + k);
  }
  c.S = c.q.asDiagonal();

  c.A = MatrixXd::Zero(M, M);
  c.L = MatrixXd::Zero(M, M);
  const double inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / (h * h);
  for (int i = 0; i < M; ++i) {
    c.A(i, (i + 1) % M) += inv2h;
    c.A(i, (i + M - 1) % M) -= inv2h;
    c.L(i, (i + 1) % M) += invh2;
    c.L(i, (i + M - 1) % M) += invh2;
    c.L(i, i) -= 2.0 * invh2;
  }
  if (variant == FiniteVariant::Dirichlet) {
    for (int e : {0, M - 1}) {
      c.A.row(e).setZero();
      c.A.col(e).setZero();
      c.L.row(e).setZero();
      c.L.col(e).setZero();
    }
  }
  c.spectrum = std::make_shared<LaplacianSpectrum>();
  return c;
}

double commutator_form(const FiniteCase& c, const VectorXcd& u) {
  require_length(c, u);
  require_boundary(c, u);
  const int M = c.size();
  const int last = cyclic(c.variant) ? M : M - 1;
  double s = 0.0;
  for (int i = 0; i < last; ++i) {
    const int j = (i + 1) % M;
    s += (c.q(j) - c.q(i)) * (u(j) * std::conj(u(i))).real();
  }
  return s;
}

double commutator_form_matrix(const FiniteCase& c, const VectorXcd& u) {
  require_length(c, u);
  require_boundary(c, u);
  const MatrixXd comm = -(c.S * c.A - c.A * c.S);
  return c.h * (u.adjoint() * comm.cast<std::complex<double>>() * u)(0).real();
}

double dft_momentum_norm(const FiniteCase& c, const VectorXcd& u) {
  require_length(c, u);
  if (!cyclic(c.variant)) throw InvalidArgument("finite: DFT representation needs a circulant A");
  const int M = c.size();
  spectral::Transform grid(1, M);
  auto data = grid.data();
  for (int k = -c.N; k <= c.N; ++k) data[static_cast<std::size_t>((k + M) % M)] = u(k + c.N);
  grid.forward();
  double s = 0.0;
  for (int n = 0; n < M; ++n) {
    const double sn = std::sin(spectral::frequency(n, M)) / c.h;
    s += sn * sn * std::norm(data[static_cast<std::size_t>(n)]) / M;
  }
  return std::sqrt(c.h * s);
}

double circulant_residual(const FiniteCase& c) {
  if (!cyclic(c.variant)) throw InvalidArgument("finite: DFT representation needs a circulant A");
  const int M = c.size();
  const MatrixXcd A = c.A.cast<std::complex<double>>();
  double worst = 0.0;
  for (int n = 0; n < M; ++n) {
    const double theta = spectral::frequency(n, M);
    VectorXcd f(M);
    for (int j = 0; j < M; ++j) f(j) = std::polar(1.0 / std::sqrt(double(M)), theta * (j - c.N));
    const std::complex<double> lambda{0.0, std::sin(theta) / c.h};
    worst = std::max(worst, (A * f - lambda * f).norm());
  }
  return worst;
}

UncertaintyReport uncertainty_finite(const FiniteCase& c, const VectorXcd& u) {
  require_length(c, u);
  require_boundary(c, u);
  if (u.cwiseAbs().maxCoeff() == 0.0) throw DegenerateInput("finite: zero sequence");
  const VectorXcd cu = u;
  UncertaintyReport r;
  r.lhs = std::abs(commutator_form(c, cu));
  r.pos_factor = weighted_norm(c, c.q.cast<std::complex<double>>().cwiseProduct(cu));
  r.mom_factor = weighted_norm(c, c.A.cast<std::complex<double>>() * cu);
  if (c.variant == FiniteVariant::DFT) {
    const double spectral_mom = dft_momentum_norm(c, cu);
    if (std::abs(spectral_mom - r.mom_factor) > 1e-10 * std::max(r.mom_factor, 1e-300))
      throw NumericalError("finite: transform and matrix momentum norms disagree");
  }
  const double denom = 2.0 * r.pos_factor * r.mom_factor;
  r.degenerate = denom == 0.0;
  r.ratio = r.degenerate ? 0.0 : r.lhs / denom;
  r.equality = !r.degenerate && std::abs(r.ratio - 1.0) <= kEqualityTolerance;
  return r;
}

FiniteMinimizer solve_minimizer(const FiniteCase& c, MinimizerMethod method) {
  FiniteMinimizer out;
  out.finite_case = c;
  out.method = method;
  const int M = c.size(), N = c.N;
  out.values = VectorXd::Zero(M);

  if (method == MinimizerMethod::LinearSolve) {
    const bool dir = c.variant == FiniteVariant::Dirichlet;
    const int off = dir ? 1 : 0;
    const int n = dir ? M - 2 : M;
    const MatrixXd op = (c.alpha * c.S + c.A).block(off, off, n, n);
    Eigen::BDCSVD<MatrixXd> svd(op, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    int kernel = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) <= kKernelTolerance * sv(0)) ++kernel;
    if (kernel != 1) {
      std::string msg = "finite: kernel of alpha S + A has dimension " + std::to_string(kernel) +
                        "; smallest singular values";
      for (int i = std::max<int>(0, int(sv.size()) - 3); i < sv.size(); ++i) msg += " " + std::to_string(sv(i));
      throw AmbiguousMinimizer(msg);
    }
    const VectorXd v = svd.matrixV().col(n - 1);
    const double center = v(N - off);
    if (std::abs(center) < 1e-300) throw AmbiguousMinimizer("finite: kernel vector vanishes at k = 0");
    out.values.segment(off, n) = v / center;
    return out;
  }

  if (c.variant == FiniteVariant::Periodic)
    throw InvalidArgument("finite: continued-fraction minimizer is available for DFT and Dirichlet only");
  out.values(N) = 1.0;
  const int top = c.variant == FiniteVariant::Dirichlet ? N - 1 : N;
  for (int k = 1; k <= top; ++k) {
    const auto a = quotients(c, k);
    const double w = out.values(N + k - 1) / bessel::cf_eval(a).value;
    out.values(N + k) = w;
    out.values(N - k) = w;
  }
  return out;
}

double minimizer_residual(const FiniteMinimizer& m) {
  const FiniteCase& c = m.finite_case;
  const double nw = m.values.norm();
  if (nw == 0.0) throw DegenerateInput("finite: zero minimizer");
  return ((c.alpha * c.S + c.A) * m.values).norm() / nw;
}

CfLimitTable dirichlet_cf_limit(int k, double alpha, double h, const std::vector<int>& N_list) {
  if (k < 1) throw InvalidArgument("dirichlet_cf_limit: k must be >= 1");
  if (!(alpha > 0.0) || !(h > 0.0)) throw InvalidArgument("dirichlet_cf_limit: alpha and h must be positive");
  const double z = 1.0 / (alpha * h * h);
  CfLimitTable t;
  t.k = k;
  const auto r = bessel::i_ratios(z, k);
  t.limit = (r[static_cast<std::size_t>(k - 1)] / r[static_cast<std::size_t>(k)]).real();
  for (int N : N_list) {
    if (N <= k) throw InvalidArgument("dirichlet_cf_limit: every N must exceed k");
    std::vector<double> a;
    for (int m = k; m <= N - 1; ++m) a.push_back(2.0 * m * alpha * h * h);
    CfLimitRow row;
    row.N = N;
    row.value = bessel::cf_eval(a).value;
    row.error = std::abs(row.value - t.limit);
    t.rows.push_back(row);
  }
  return t;
}

double dirichlet_cf_closed_form(int k, int N, double alpha, double h) {
  if (k < 1 || N <= k || N > 60) throw InvalidArgument("dirichlet_cf_closed_form: need 1 <= k < N <= 60");
  if (!(alpha > 0.0) || !(h > 0.0)) throw InvalidArgument("dirichlet_cf_closed_form: alpha and h must be positive");
  const double z = 1.0 / (alpha * h * h);
  // Each term is one I times one K, so the common e^{-z} scaling of I cancels.
  const auto I = bessel::i_family_scaled(z, N);
  const auto K = bessel::k_family(N, z);
  auto i = [&](int n) { return I[static_cast<std::size_t>(n)].real(); };
  auto kk = [&](int n) { return K[static_cast<std::size_t>(n)]; };
  const double s = (N + k) % 2 == 0 ? 1.0 : -1.0;
  return (s * kk(k - 1) * i(N) + i(k - 1) * kk(N)) / (-s * kk(k) * i(N) + i(k) * kk(N));
}

std::pair<double, double> dft_limit_profile(double x, double L, int j) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("dft_limit_profile: L must be positive");
  if (!std::isfinite(x) || std::abs(x) > L) throw InvalidArgument("dft_limit_profile: need |x| <= L");
  if (j < 1) throw InvalidArgument("dft_limit_profile: j must be >= 1");
  const double limit = std::exp(L * L * (std::cos(kPi * x / L) - 1.0) / (kPi * kPi));
  if (x == 0.0) return {1.0, 1.0};
  const double ax = std::abs(x);
  const double ratio = j * L / ax;
  const double near = std::nearbyint(ratio);
  const int N = static_cast<int>(std::abs(ratio - near) <= 1e-12 * ratio ? near : std::ceil(ratio));
  const FiniteCase c = build_case(FiniteVariant::DFT, N, ax / j, 1.0, PositionWeights::Limit);
  const auto m = solve_minimizer(c, MinimizerMethod::ContinuedFraction);
  return {m.values(N + j), limit};
}

Eigen::VectorXcd finite_evolve(const FiniteCase& c, const VectorXcd& u0, double t) {
  require_length(c, u0);
  require_boundary(c, u0);
  if (!std::isfinite(t)) throw InvalidArgument("finite: non-finite time");
  const auto& sp = spectrum(c);
  const MatrixXcd V = sp.vectors.cast<std::complex<double>>();
  VectorXcd coef = V.adjoint() * u0;
  for (int i = 0; i < coef.size(); ++i) coef(i) *= std::polar(1.0, t * sp.values(i));
  VectorXcd u = V * coef;
  if (c.variant == FiniteVariant::Dirichlet) u(0) = u(c.size() - 1) = 0.0;
  return u;
}

FiniteVirial finite_virial(const FiniteCase& c, const VectorXcd& u0, double t) {
  const VectorXcd u = finite_evolve(c, u0, t);
  const int M = c.size();
  const std::complex<double> I{0.0, 1.0};
  const MatrixXcd L = c.L.cast<std::complex<double>>();
  MatrixXcd C = MatrixXcd::Zero(M, M);
  for (int k = -c.N; k <= c.N; ++k) C(k + c.N, k + c.N) = c.h * (k * c.h) * (k * c.h);
  double d[4];
  for (double& v : d) {
    v = (u.adjoint() * C * u)(0).real();
    C = (I * (C * L - L * C)).eval();
  }
  return {d[0], d[1], d[2], d[3]};
}

const std::vector<FiniteCounterexample>& finite_counterexamples() {
  static const std::vector<FiniteCounterexample> table{
      {FiniteVariant::Periodic, 3, {0, 1, 0, 0, 0, 1, 0}, 8.0},
      {FiniteVariant::Periodic, 3, {2, 1, 0, 0, 0, 1, 0}, -12.0},
      {FiniteVariant::Dirichlet, 3, {0, 1, 0, 0, 0, 1, 0}, -12.0},
      {FiniteVariant::Dirichlet, 3, {0, 1, 2, 0, 0, 1, 0}, 4.0},
  };
  return table;
}

}  // namespace ulab
