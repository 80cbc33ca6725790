#include "cq/operator_core.hpp"

#include <cmath>
#include <numbers>

#include "cq/errors.hpp"

namespace cq {

FockOps fock_rep(int dim, double hbar) {
  if (dim < 1) throw InvalidArgument("fock_rep: dim must be positive");
  if (!(hbar > 0.0)) throw InvalidArgument("fock_rep: hbar must be positive");
  if (dim > kMaxFockDim) throw InvalidArgument("fock_rep: dim exceeds 256");
  FockOps f;
  f.rep = {RepKind::Fock, dim, hbar, 0.0, 0.0};
  f.a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) f.a(n - 1, n) = std::sqrt(n * hbar);
  f.a_dagger = f.a.adjoint();
  const double r2 = std::sqrt(2.0);
  f.s2 = (f.a + f.a_dagger) / r2;
  f.s1 = (f.a - f.a_dagger) / (I * r2);
  f.number_op = f.a_dagger * f.a;
  return f;
}

namespace {

RMat fourier_diff(int n, double period) {
  RMat d = RMat::Zero(n, n);
  const double pi = std::numbers::pi;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const double t = (j - k) * pi / n;
      const double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      const double v = (n % 2 == 0) ? 1.0 / std::tan(t) : 1.0 / std::sin(t);
      d(j, k) = 0.5 * sgn * v * (2.0 * pi / period);
    }
  }
  return d;
}

RMat central4_diff(int n, double h) {
  RMat d = RMat::Zero(n, n);
  auto w = [n](int i) { return ((i % n) + n) % n; };
  for (int j = 0; j < n; ++j) {
    d(j, w(j + 1)) += 8.0 / (12.0 * h);
    d(j, w(j - 1)) -= 8.0 / (12.0 * h);
    d(j, w(j + 2)) -= 1.0 / (12.0 * h);
    d(j, w(j - 2)) += 1.0 / (12.0 * h);
  }
  return d;
}

}  // namespace

GridOps grid_rep(int dim, double hbar, double x_min, double x_max, GridDerivative method) {
  if (!(x_min < x_max)) throw InvalidArgument("grid_rep: x_min must be below x_max");
  if (dim < 8) throw InvalidArgument("grid_rep: dim must be at least 8");
  if (dim > kMaxGridDim) throw InvalidArgument("grid_rep: dim exceeds 2048");
  if (!(hbar > 0.0)) throw InvalidArgument("grid_rep: hbar must be positive");
  GridOps g;
  g.rep = {RepKind::Grid, dim, hbar, x_min, x_max};
  g.method = method;
  g.points = RVec::LinSpaced(dim, x_min, x_max);
  const double h = (x_max - x_min) / (dim - 1);
  RMat d = method == GridDerivative::Spectral ? fourier_diff(dim, h * dim) : central4_diff(dim, h);
  g.position = g.points.cast<cplx>().asDiagonal();
  g.momentum = -I * hbar * d.cast<cplx>();
  return g;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

Operator commutator(const Operator& a, const Operator& b) {
  if (!(a.rep == b.rep)) throw RepMismatch("commutator: operators live on different reps");
  return {a.rep, commutator(a.m, b.m)};
}

double block_norm(const Mat& m, int k) {
  if (k <= 0 || k > m.rows()) k = static_cast<int>(m.rows());
  return m.topLeftCorner(k, k).norm();
}

double masked_norm(const Mat& m, const std::vector<int>& keep) {
  double s = 0.0;
  for (int i : keep)
    for (int j : keep) s += std::norm(m(i, j));
  return std::sqrt(s);
}

int poly_degree(const Polynomial& p) {
  int d = 0;
  for (const auto& [e, c] : p)
    if (c != cplx(0.0)) d = std::max(d, e.first + e.second);
  return d;
}

namespace {
double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (n - i);
  return r;
}
double factorial(int n) { return falling(n, n); }
}  // namespace

cplx poly_derivative(const Polynomial& p, int i, int j, double q, double pv) {
  cplx s = 0.0;
  for (const auto& [e, c] : p) {
    const auto [m, n] = e;
    if (m < i || n < j) continue;
    s += c * falling(m, i) * falling(n, j) * std::pow(q, m - i) * std::pow(pv, n - j);
  }
  return s;
}

Polynomial poly_shift(const Polynomial& p, double q, double pv, double c) {
  const int deg = poly_degree(p);
  Polynomial out;
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; i + j <= deg; ++j) {
      const cplx d = poly_derivative(p, i, j, q, pv);
      if (d == cplx(0.0)) continue;
      out[{i, j}] = d * std::pow(c, i + j) / (factorial(i) * factorial(j));
    }
  return out;
}

Mat weyl_quantize(const Polynomial& poly, const Mat& q_op, const Mat& p_op) {
  if (poly_degree(poly) > kMaxWeylDegree)
    throw Unsupported("weyl_quantize: total degree above 12");
  const auto n = q_op.rows();
  // sums[(m,n)] = sum over all words with m Q's and n P's
  std::map<std::pair<int, int>, Mat> sums;
  sums[{0, 0}] = Mat::Identity(n, n);
  std::function<const Mat&(int, int)> word_sum = [&](int m, int k) -> const Mat& {
    auto it = sums.find({m, k});
    if (it != sums.end()) return it->second;
    Mat s = Mat::Zero(n, n);
    if (m > 0) s += q_op * word_sum(m - 1, k);
    if (k > 0) s += p_op * word_sum(m, k - 1);
    return sums.emplace(std::make_pair(m, k), std::move(s)).first->second;
  };
  Mat out = Mat::Zero(n, n);
  for (const auto& [e, c] : poly) {
    if (c == cplx(0.0)) continue;
    const auto [m, k] = e;
    const double words = factorial(m + k) / (factorial(m) * factorial(k));
    out += c * word_sum(m, k) / words;
  }
  return out;
}

Mat spectral_fn(const Mat& d, const std::function<double(double)>& f, double domain_min, bool clamp) {
  const auto n = d.rows();
  Mat off = d;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-12 && n > 1)
    throw InvalidArgument("spectral_fn: operator is not diagonal in the number basis");
  Mat out = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double v = d(k, k).real();
    if (std::abs(d(k, k).imag()) > 1e-12)
      throw InvalidArgument("spectral_fn: complex eigenvalue");
    if (std::abs(v - domain_min) <= 1e-12) {
      v = domain_min;
    } else if (v < domain_min) {
      if (clamp)
        v = domain_min;
      else
        throw SpectralDomainError(static_cast<int>(k), v);
    }
    out(k, k) = f(v);
  }
  return out;
}

Mat spectral_sqrt(const Mat& d, bool clamp) {
  return spectral_fn(d, [](double x) { return std::sqrt(x); }, 0.0, clamp);
}

Mat grading_derivative(const HBarFamily& family, double hbar0, double delta) {
  const Mat up = family(hbar0 * (1.0 + delta));
  const Mat dn = family(hbar0 * (1.0 - delta));
  return (up - dn) / delta;
}

bool is_hermitian(const Mat& m, double tol) { return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol; }

}  // namespace cq
