#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "cq/errors.hpp"
#include "cq/operator_core.hpp"

using namespace cq;

namespace {

Mat lead(const Mat& m, int k) { return m.topLeftCorner(k, k); }

Mat random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return Mat(m + m.adjoint());
}

}  // namespace

TEST_CASE("fock ladder entries follow sqrt(n hbar)") {
  const FockOps f = fock_rep(3, 1.0);
  Mat expect = Mat::Zero(3, 3);
  expect(0, 1) = 1.0;
  expect(1, 2) = std::sqrt(2.0);
  CHECK((f.a - expect).norm() == doctest::Approx(0.0));
  CHECK((f.a_dagger - f.a.adjoint()).norm() == 0.0);
}

TEST_CASE("fock commutators on the leading block") {
  for (double hb : {1.0, 0.5, 0.3}) {
    const FockOps f = fock_rep(16, hb);
    const Mat c = commutator(f.s1, f.s2);
    CHECK((lead(c, 15) + I * hb * Mat::Identity(15, 15)).norm() < 1e-13);
    const Mat aa = commutator(f.a, f.a_dagger);
    CHECK((lead(aa, 15) - hb * Mat::Identity(15, 15)).norm() < 1e-13);
  }
}

TEST_CASE("number operator spectrum") {
  const FockOps f = fock_rep(4, 2.0);
  RVec d(4);
  d << 0, 2, 4, 6;
  CHECK((f.number_op - Mat(d.cast<cplx>().asDiagonal())).norm() < 1e-14);
}

TEST_CASE("fock_rep rejects bad arguments") {
  CHECK_THROWS_AS(fock_rep(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(fock_rep(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(fock_rep(4, -1.0), InvalidArgument);
}

TEST_CASE("grid canonical commutator on a Gaussian") {
  const GridOps g = grid_rep(512, 1.0, -10.0, 10.0);
  Vec psi(512);
  for (int i = 0; i < 512; ++i) psi(i) = std::exp(-0.5 * g.points(i) * g.points(i));
  const Vec r = (g.position * g.momentum - g.momentum * g.position) * psi - I * psi;
  CHECK(r.norm() / psi.norm() < 1e-8);
  Mat off = g.position;
  off.diagonal().setZero();
  CHECK(off.norm() == 0.0);
}

TEST_CASE("grid momentum kills constants and matches plane waves") {
  for (GridDerivative m : {GridDerivative::Spectral, GridDerivative::Central4}) {
    const GridOps g = grid_rep(64, 0.7, -3.0, 3.0, m);
    CHECK((g.momentum * Vec::Ones(64)).norm() < 1e-10);
  }
  // a mode that is periodic on the grid: period = dim * dx
  const int n = 64;
  const GridOps g = grid_rep(n, 1.0, 0.0, 1.0);
  const double period = n * (1.0 / (n - 1));
  const double k = 2.0 * M_PI * 3.0 / period;
  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = std::exp(I * k * g.points(i));
  CHECK((g.momentum * w - k * w).norm() / w.norm() < 1e-9);
}

TEST_CASE("grid_rep argument checks") {
  CHECK_THROWS_AS(grid_rep(64, 1.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(grid_rep(4, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("commutator basics and rep mismatch") {
  const FockOps f = fock_rep(6, 1.0);
  CHECK(commutator(f.s1, f.s1).norm() == 0.0);
  const Operator a{f.rep, f.s1};
  const Operator b{fock_rep(6, 0.5).rep, f.s2};
  CHECK_THROWS_AS(commutator(a, b), RepMismatch);
  const Operator c = commutator(a, Operator{f.rep, f.s2});
  CHECK((lead(c.m, 5) + I * Mat::Identity(5, 5)).norm() < 1e-13);
}

TEST_CASE("weyl symmetrization of low monomials") {
  const Mat Q = random_hermitian(5, 1), P = random_hermitian(5, 2);
  CHECK((weyl_quantize({{{1, 1}, 1.0}}, Q, P) - (Q * P + P * Q) / 2.0).norm() < 1e-12);
  CHECK((weyl_quantize({{{2, 1}, 1.0}}, Q, P) - (Q * Q * P + Q * P * Q + P * Q * Q) / 3.0).norm() < 1e-12);
  // q^2 p^2: six orderings
  const Mat qqpp = (Q * Q * P * P + Q * P * Q * P + Q * P * P * Q + P * Q * Q * P + P * Q * P * Q + P * P * Q * Q) / 6.0;
  CHECK((weyl_quantize({{{2, 2}, 1.0}}, Q, P) - qqpp).norm() < 1e-11);
}

TEST_CASE("weyl quantized oscillator spectrum") {
  const FockOps f = fock_rep(16, 1.0);
  const Mat H = weyl_quantize({{{2, 0}, 0.5}, {{0, 2}, 0.5}}, f.s2, f.s1);
  CHECK(is_hermitian(H));
  // the top level loses half of a a^dagger to truncation
  RVec expect = RVec::LinSpaced(15, 0.5, 14.5);
  CHECK((H.topLeftCorner(15, 15) - Mat(expect.cast<cplx>().asDiagonal())).norm() < 1e-12);
  CHECK(std::abs(H(15, 15) - 7.5) < 1e-12);
}

TEST_CASE("weyl quantization of real polynomials is hermitian") {
  const Mat Q = random_hermitian(6, 3), P = random_hermitian(6, 4);
  const Polynomial p = {{{3, 0}, 1.0}, {{1, 2}, -0.5}, {{0, 1}, 2.0}, {{2, 2}, 0.25}};
  CHECK(is_hermitian(weyl_quantize(p, Q, P), 1e-11));
  CHECK_THROWS_AS(weyl_quantize({{{7, 6}, 1.0}}, Q, P), Unsupported);
}

TEST_CASE("poly_shift agrees with direct evaluation") {
  const Polynomial H = {{{3, 0}, 1.0}, {{1, 2}, -0.5}, {{0, 1}, 2.0}};
  auto eval = [](const Polynomial& p, double q, double pp) {
    cplx s = 0.0;
    for (const auto& [k, c] : p) s += c * std::pow(q, k.first) * std::pow(pp, k.second);
    return s;
  };
  const double q = 0.3, p = -0.7, c = 0.6;
  const Polynomial shifted = poly_shift(H, q, p, c);
  for (auto [sq, sp] : {std::pair{0.2, 0.1}, std::pair{-1.0, 0.5}, std::pair{0.0, 0.0}})
    CHECK(std::abs(eval(shifted, sq, sp) - eval(H, q + c * sq, p + c * sp)) < 1e-12);
  CHECK(poly_degree(H) == 3);
  CHECK(std::abs(poly_derivative(H, 1, 0, q, p) - (3.0 * q * q - 0.5 * p * p)) < 1e-14);
  CHECK(std::abs(poly_derivative(H, 0, 1, q, p) - (-q * p + 2.0)) < 1e-14);
}

TEST_CASE("spectral functions") {
  RVec d(3);
  d << 0, 1, 4;
  const Mat m = d.cast<cplx>().asDiagonal();
  RVec r(3);
  r << 0, 1, 2;
  CHECK((spectral_sqrt(m) - Mat(r.cast<cplx>().asDiagonal())).norm() < 1e-15);
  CHECK((spectral_fn(m, [](double x) { return x; }) - m).norm() == 0.0);

  auto arg = [](int dim) {
    const FockOps f = fock_rep(dim, 1.0);
    return Mat(Mat::Identity(dim, dim) - (f.number_op + Mat::Identity(dim, dim)) / 2.0);
  };
  const Mat s2 = spectral_sqrt(arg(2));
  CHECK(std::abs(s2(0, 0) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(s2(1, 1)) == 0.0);
  try {
    spectral_sqrt(arg(3));
    FAIL("expected a domain error");
  } catch (const SpectralDomainError& e) {
    CHECK(e.level == 2);
    CHECK(e.value == doctest::Approx(-0.5));
  }
  CHECK(std::abs(spectral_sqrt(arg(3), true)(2, 2)) == 0.0);
  Mat nondiag = Mat::Identity(2, 2);
  nondiag(0, 1) = 0.1;
  CHECK_THROWS_AS(spectral_sqrt(nondiag), InvalidArgument);
}

TEST_CASE("grading derivative on homogeneous families") {
  const Mat M = random_hermitian(3, 5);
  CHECK(grading_derivative([&](double) { return M; }, 1.0).norm() < 1e-12);
  CHECK((grading_derivative([](double h) { return Mat(h * Mat::Identity(2, 2)); }, 1.0) - 2.0 * Mat::Identity(2, 2))
            .norm() < 1e-8);
  for (int k : {-2, -1, 0, 1, 2})
    for (double h0 : {0.5, 1.0}) {
      const Mat g = grading_derivative([&](double h) { return Mat(std::pow(h, k / 2.0) * M); }, h0);
      CHECK((g - k * std::pow(h0, k / 2.0) * M).norm() / M.norm() < 1e-6);
    }
}

TEST_CASE("block and masked norms") {
  Mat m = Mat::Zero(3, 3);
  m(2, 2) = 5.0;
  m(0, 1) = 1.0;
  CHECK(block_norm(m, 2) == doctest::Approx(1.0));
  CHECK(masked_norm(m, {0, 2}) == doctest::Approx(5.0));
}
