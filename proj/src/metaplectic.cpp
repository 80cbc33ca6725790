#include "cq/metaplectic.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/FFT>

#include "cq/errors.hpp"
#include "cq/parallel.hpp"

namespace cq {

Mat2 FreeSymplectic::matrix() const {
  Mat2 g;
  g << A, B, C, D;
  return g;
}

bool is_free(const Mat2& g, double tol) { return std::abs(g(0, 1)) > tol; }

FreeSymplectic FreeSymplectic::from_matrix(const Mat2& g) {
  if (std::abs(g.determinant() - 1.0) > 1e-10) throw NotSymplectic("FreeSymplectic: det != 1");
  if (!is_free(g)) throw InvalidArgument("FreeSymplectic: B block vanishes");
  return {g(0, 0), g(0, 1), g(1, 0), g(1, 1)};
}

GridWavefunction make_wavefunction(int n, double L, const std::function<cplx(double)>& f) {
  if (n < 8 || n > kMaxGridDim) throw InvalidArgument("make_wavefunction: grid size out of range");
  GridWavefunction w;
  w.y = RVec::LinSpaced(n, -L, L);
  w.samples.resize(n);
  for (int i = 0; i < n; ++i) w.samples(i) = f(w.y(i));
  return w;
}

GridWavefunction gaussian(int n, double L, double center, double width) {
  return make_wavefunction(n, L, [=](double y) {
    const double z = (y - center) / width;
    return cplx(std::exp(-0.5 * z * z));
  });
}

double l2_norm(const GridWavefunction& psi) { return psi.samples.norm() * std::sqrt(psi.dy()); }

namespace {

double support_radius(const GridWavefunction& psi) {
  const double peak = psi.samples.cwiseAbs().maxCoeff();
  double r = 0.0;
  for (Eigen::Index i = 0; i < psi.samples.size(); ++i)
    if (std::abs(psi.samples(i)) > 1e-12 * peak) r = std::max(r, std::abs(psi.y(i)));
  return r;
}

RVec wavenumbers(int n, double dy) {
  RVec k(n);
  for (int m = 0; m < n; ++m) {
    const int mm = m <= n / 2 ? m : m - n;
    k(m) = 2.0 * M_PI * mm / (n * dy);
  }
  return k;
}

Vec fourier_multiply(const GridWavefunction& psi, const std::function<cplx(double)>& mult) {
  const int n = static_cast<int>(psi.samples.size());
  Eigen::FFT<double> fft;
  std::vector<cplx> in(psi.samples.data(), psi.samples.data() + n), spec, out;
  fft.fwd(spec, in);
  const RVec k = wavenumbers(n, psi.dy());
  for (int m = 0; m < n; ++m) spec[m] *= mult(k(m));
  fft.inv(out, spec);
  return Eigen::Map<Vec>(out.data(), n);
}

}  // namespace

GridWavefunction free_metaplectic_apply(const FreeSymplectic& F, const GridWavefunction& psi) {
  const Mat2 g = F.matrix();
  if (std::abs(g.determinant() - 1.0) > 1e-10) throw NotSymplectic("free_metaplectic_apply: det != 1");
  if (std::abs(F.B) <= 1e-8) throw InvalidArgument("free_metaplectic_apply: B block vanishes");
  const int n = static_cast<int>(psi.y.size());
  const double dy = psi.dy();
  const double R = support_radius(psi);
  // phase gradient in the integration variable, with input and output both
  // taken to live on the support of psi
  const double kmax = (std::abs(F.A) + 1.0) * R / std::abs(F.B);
  if (kmax >= M_PI / dy)
    throw ResolutionError("free_metaplectic_apply: chirp wavenumber " + std::to_string(kmax) +
                          " exceeds Nyquist bound " + std::to_string(M_PI / dy));
  const double binv = 1.0 / F.B;
  const double pref = std::sqrt(std::abs(binv) / (2.0 * M_PI)) * dy;
  GridWavefunction out = psi;
  parallel_for(n, [&](std::size_t i) {
    const double x = psi.y(i);
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double xt = psi.y(k);
      const double a = 0.5 * binv * F.A * xt * xt + 0.5 * F.D * binv * x * x - binv * x * xt;
      const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      acc += w * std::exp(I * a) * psi.samples(k);
    }
    out.samples(i) = pref * acc;
  });
  return out;
}

GridWavefunction lower_triangular_apply(double c, const GridWavefunction& psi) {
  GridWavefunction out = psi;
  for (Eigen::Index i = 0; i < psi.y.size(); ++i)
    out.samples(i) *= std::exp(I * (0.5 * c * psi.y(i) * psi.y(i)));
  return out;
}

GridWavefunction metaplectic_oracle(const Mat2& g, const GridWavefunction& psi) {
  if (is_free(g)) return free_metaplectic_apply(FreeSymplectic::from_matrix(g), psi);
  if (std::abs(g(0, 0) - 1.0) < 1e-10 && std::abs(g(1, 1) - 1.0) < 1e-10)
    return lower_triangular_apply(g(1, 0), psi);
  throw Unsupported("metaplectic_oracle: only free or unipotent lower-triangular matrices");
}

GridWavefunction spectral_free_propagator(double t, const GridWavefunction& psi) {
  GridWavefunction out = psi;
  out.samples = fourier_multiply(psi, [t](double k) { return std::exp(-I * (0.5 * t * k * k)); });
  return out;
}

double projective_residual(const Vec& a, const Vec& b) {
  const cplx overlap = b.dot(a);  // conj(b) . a
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
  return (a - phase * b).norm() / a.norm();
}

double compose_up_to_phase(const FreeSymplectic& F1, const FreeSymplectic& F2, const GridWavefunction& psi) {
  const GridWavefunction two_step = free_metaplectic_apply(F1, free_metaplectic_apply(F2, psi));
  const GridWavefunction direct = metaplectic_oracle(F1.matrix() * F2.matrix(), psi);
  return projective_residual(direct.samples, two_step.samples);
}

Vec heisenberg_apply(const Eigen::Vector2d& u, const GridWavefunction& psi) {
  const Vec dpsi = fourier_multiply(psi, [](double k) { return I * k; });
  Vec out(psi.samples.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = -u(1) * psi.y(i) * psi.samples(i) + u(0) * (-I) * dpsi(i);
  return out;
}

double conjugation_check(const FreeSymplectic& g, const Eigen::Vector2d& u, const GridWavefunction& psi) {
  const FreeSymplectic ginv = FreeSymplectic::from_matrix(g.matrix().inverse());
  GridWavefunction mid = free_metaplectic_apply(ginv, psi);
  mid.samples = heisenberg_apply(u, mid);
  const GridWavefunction lhs = free_metaplectic_apply(g, mid);
  const Vec rhs = heisenberg_apply(g.matrix() * u, psi);
  return projective_residual(rhs, lhs.samples);
}

namespace {

Sp2Generators assemble(const Mat& sp, const Mat& sm) {
  Sp2Generators g;
  g.s_plus = sp;
  g.s_minus = sm;
  g.m_pp = sp * sp;
  g.m_mm = sm * sm;
  g.m_pm = sp * sm + sm * sp;
  return g;
}

}  // namespace

Sp2Generators sp2_generators(const FockOps& rep) { return assemble(rep.s2, rep.s1); }
Sp2Generators sp2_generators(const GridOps& rep) { return assemble(rep.position, rep.momentum); }

double sp2_relation_residual(const Sp2Generators& g, int interior) {
  return block_norm(commutator(g.m_mm, g.m_pp) + 2.0 * I * g.m_pm, interior);
}

double sp2_relation_residual(const Sp2Generators& g, const Vec& state) {
  const Vec lhs = g.m_mm * (g.m_pp * state) - g.m_pp * (g.m_mm * state);
  const Vec rhs = -2.0 * I * (g.m_pm * state);
  return (lhs - rhs).norm() / rhs.norm();
}

double shear_linearization_residual(const GridWavefunction& psi, double h) {
  // M_T = M_{S^-1} M_{S T}: both factors free, so small t stays resolvable.
  const FreeSymplectic sinv = FreeSymplectic::from_matrix(sp2_S().inverse());
  auto shear = [&](double t) {
    const GridWavefunction v =
        free_metaplectic_apply(sinv, free_metaplectic_apply(FreeSymplectic::from_matrix(sp2_S() * sp2_T(t)), psi));
    const cplx overlap = psi.samples.dot(v.samples);
    return Vec(v.samples * std::conj(overlap) / std::abs(overlap));
  };
  const double nn = psi.samples.squaredNorm();
  auto project = [&](const Vec& v) { return Vec(v - psi.samples * (psi.samples.dot(v) / nn)); };
  const Vec tangent = project((shear(h) - shear(-h)) / (2.0 * h));
  const Vec d2 = fourier_multiply(psi, [](double k) { return -k * k; });
  const Vec expected = project(0.5 * I * d2);  // -(i/2) s_-^2 = (i/2) d^2/dy^2
  return (tangent - expected).norm() / expected.norm();
}

Mat2 sp2_S() {
  Mat2 s;
  s << 0, 1, -1, 0;
  return s;
}

Mat2 sp2_T(double t) {
  Mat2 m;
  m << 1, t, 0, 1;
  return m;
}

Mat2 random_free(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), sq(-0.4, 0.4);
  auto rot = [](double a) {
    Mat2 r;
    r << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
    return r;
  };
  for (;;) {
    const double s = sq(rng);
    const Mat2 g = rot(ang(rng)) * Eigen::Vector2d(std::exp(s), std::exp(-s)).asDiagonal() * rot(ang(rng));
    if (std::abs(g(0, 1)) > 0.5) return g;
  }
}

}  // namespace cq
