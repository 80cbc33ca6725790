#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cq/connection.hpp"
#include "cq/errors.hpp"
#include "cq/models.hpp"
#include "cq/s3.hpp"

using namespace cq;

namespace {

RVec v3(double a, double b, double c) {
  RVec x(3);
  x << a, b, c;
  return x;
}

PathSpec straight(const RVec& a, const RVec& b) {
  PathSpec p;
  p.curve = [a, b](double t) { return RVec(a + t * (b - a)); };
  p.velocity = [a, b](double) { return RVec(b - a); };
  return p;
}

Chart plain_chart() {
  Chart c;
  c.names = {"x", "y", "z"};
  return c;
}

Vec unit(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v(k) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("zero connection") {
  const QuantumConnection z = zero_connection(plain_chart(), 3);
  CHECK(flatness_residual(z, {v3(0, 0, 0), v3(1, 2, 3)}).max == 0.0);
  const Vec psi = Vec::Random(3);
  CHECK((parallel_transport(z, straight(v3(0, 0, 0), v3(1, 1, 1)), psi).psi - psi).norm() == 0.0);
  CHECK_THROWS_AS(curvature(z, v3(0, 0, 0), 1, 1), InvalidArgument);
}

TEST_CASE("curvature is antisymmetric and matches the hand formula") {
  // A_0 = x1 M, A_1 = N, A_2 = 0: F_01 = -M + [x1 M, N]
  const FockOps f = fock_rep(4, 1.0);
  const Mat M = I * f.s1, N = I * f.s2;
  QuantumConnection q = zero_connection(plain_chart(), 4);
  q.coeff = [=](const RVec& x, int i) -> Mat {
    if (i == 0) return x(1) * M;
    if (i == 1) return N;
    return Mat::Zero(4, 4);
  };
  q.dcoeff = [=](const RVec&, int i, int k) -> Mat { return (i == 0 && k == 1) ? M : Mat(Mat::Zero(4, 4)); };
  const RVec x = v3(0.1, 0.7, -0.2);
  const Mat expect = -M + 0.7 * (M * N - N * M);
  CHECK((curvature(q, x, 0, 1) - expect).norm() < 1e-14);
  CHECK((curvature(q, x, 0, 1) + curvature(q, x, 1, 0)).norm() == 0.0);
  CHECK((curvature(q, x, 0, 1, DerivMethod::FiniteDifference) - expect).norm() < 1e-8);
}

TEST_CASE("flat models") {
  const ModelInstance d = darboux_model(1, 1.0, 16);
  const auto pts = sample_points(d.chart, RVec::Constant(3, -1), RVec::Constant(3, 1), 50, 1);
  CHECK(flatness_residual(d.conn, pts).max < 1e-10);
  const ModelInstance s3 = s3_strict_model(1.0, 2);
  const auto sp = sample_points(s3.chart, v3(0.05, 0, 0), v3(1.5, 6.2, 6.2), 100, 2);
  CHECK(flatness_residual(s3.conn, sp).max < 1e-9);
  const ModelInstance h = hamsys_model(harmonic_oscillator(), 1.0, 16);
  CHECK(flatness_residual(h.conn, pts).max < 1e-8);
  const ModelInstance bad = r3_model(1.0, 12, true);
  const auto rp = sample_points(bad.chart, v3(0.5, 0, -1), v3(2, 6, 1), 10, 3);
  CHECK(flatness_residual(bad.conn, rp).max > 1e-3);
}

TEST_CASE("classical limits") {
  const ModelInstance d = darboux_model(1, 1.0, 8);
  const RVec x = v3(0.3, -0.8, 0.2);
  const ClassicalLimit cl = classical_limit_check(d.family, d.alpha, x, {0.5, 0.25, 0.1, 0.05});
  CHECK(cl.is_quantization);
  CHECK((cl.constant - v3(-0.8, 0, -1)).norm() < 1e-8);

  // (alpha / i hbar) Id exactly
  auto exact = [&](double hb) {
    QuantumConnection q = zero_connection(d.chart, 3);
    q.coeff = [=](const RVec& p, int i) { return Mat(d.alpha.eval(p)(i) / (I * hb) * Mat::Identity(3, 3)); };
    return q;
  };
  const ClassicalLimit ce = classical_limit_check(exact, d.alpha, x, {0.5, 0.2, 0.1});
  CHECK(ce.error.maxCoeff() < 1e-13);

  const ModelInstance s3 = s3_strict_model(0.5, 4);
  const RVec y = v3(0.6, 0.3, 1.2);
  const ClassicalLimit cs = classical_limit_check(s3.family, s3.alpha, y, {0.5, 0.25, 0.2, 0.1});
  CHECK(cs.error.maxCoeff() < 1e-6);
  CHECK_THROWS_AS(classical_limit_check(d.family, d.alpha, x, {0.5, 0.25}), InvalidArgument);
  CHECK_THROWS_AS(classical_limit_check(d.family, d.alpha, x, {1.0, 0.25, 0.1}), InvalidArgument);
}

TEST_CASE("induced distribution connection") {
  const ModelInstance d = darboux_model(1, 1.0, 10);
  const InducedConnection id = induced_xi_connection(d.conn, d.coframe, d.alpha, v3(0.2, 0.1, 0.0));
  for (const RMat& w : id.omega) CHECK(w.norm() < 1e-8);

  const ModelInstance r3 = r3_model(1.0, 12);
  const RVec x = v3(1.3, 0.4, 0.1);
  const InducedConnection ir = induced_xi_connection(r3.conn, r3.coframe, r3.alpha, x);
  CHECK(ir.calibration_residual < 1e-10);
  CHECK(torsion_residual(r3.coframe, ir.omega, r3.chart, x) < 1e-7);
  // Euler field r d_r has frame components (r, 0); nabla_u of it is u.
  // Along d_r the derivative term already gives (1, 0).
  const RVec euler(Eigen::Vector2d(x(0), 0.0));
  const RVec ur = v3(1, 0, 0);
  const RVec ut = v3(0, 1, 0.5 * x(0) * x(0));
  RMat wr = RMat::Zero(2, 2), wt = RMat::Zero(2, 2);
  for (int k = 0; k < 3; ++k) {
    wr += ur(k) * ir.omega[k];
    wt += ut(k) * ir.omega[k];
  }
  CHECK((wr * euler).norm() < 1e-9);
  CHECK((wt * euler - Eigen::Vector2d(0, x(0))).norm() < 1e-9);

  QuantumConnection bare = zero_connection(r3.chart, 3);
  CHECK_THROWS_AS(induced_xi_connection(bare, r3.coframe, r3.alpha, x), InvalidArgument);
}

TEST_CASE("oscillator transport against the matrix exponential") {
  const int dim = 16;
  const FockOps f = fock_rep(dim, 1.0);
  const Mat H = (f.s1 * f.s1 + f.s2 * f.s2) / 2.0;
  const ModelInstance ho = hamsys_model(harmonic_oscillator(), 1.0, dim);
  // flat-form sign: A_t = (i / hbar) W[H], so transport is exp(-i H t)
  CHECK((ho.conn.coeff(v3(0, 0, 0), 2) - I * H).norm() < 1e-12);

  Vec psi = Vec::Zero(dim);
  for (int k = 0; k < 4; ++k) psi(k) = std::exp(-0.3 * k) * std::exp(I * (0.7 * k));
  psi /= psi.norm();
  const double T = 2.0 * M_PI;
  const TransportResult r = parallel_transport(ho.conn, straight(v3(0, 0, 0), v3(0, 0, T)), psi);
  const Mat U = (-I * T * H).exp();
  CHECK((r.psi - U * psi).norm() < 1e-6);
  CHECK((r.psi + psi).norm() < 1e-6);
  CHECK(r.norm_drift / T < 1e-6);

  const Vec e0 = unit(dim, 0), e1 = unit(dim, 1);
  const PathSpec quarter = straight(v3(0, 0, 0), v3(0, 0, M_PI / 2));
  CHECK(std::abs(transition_probability(ho.conn, quarter, e0, e0) - 1.0) < 1e-6);
  CHECK(transition_probability(ho.conn, quarter, e0, e1) < 1e-8);
  const Vec moved = parallel_transport(ho.conn, quarter, psi).psi;
  CHECK(std::abs(transition_probability(ho.conn, quarter, psi, Vec(moved / moved.norm())) - 1.0) < 1e-8);
  CHECK_THROWS_AS(transition_probability(ho.conn, quarter, Vec(2.0 * e0), e0), InvalidArgument);
}

TEST_CASE("transport argument checks") {
  const Vec psi = unit(2, 0);
  const auto fast = [](double) { return Mat(50.0 * I * Mat::Identity(2, 2)); };
  CHECK_THROWS_AS(transport_generator(fast, 0.0, 1.0, 16, psi), StepSizeError);
  CHECK_NOTHROW(transport_generator(fast, 0.0, 1.0, 16, psi, false));
  CHECK_THROWS_AS(transport_generator(fast, 0.0, 1.0, 8, psi), InvalidArgument);
  CHECK_THROWS_AS(transport_generator(fast, 0.0, 1.0, 64, Vec::Zero(2)), InvalidArgument);
}

TEST_CASE("distribution loop around the circle") {
  // frames (dr, r dtheta): torsion-free representative omega^2_1 = dtheta, a rotation generator
  const ModelInstance r3 = r3_model(1.0, 12);
  const RVec x = v3(1, 0, 0);
  ConnectionForm w(3, RMat::Zero(2, 2));
  w[1](0, 1) = -1.0;
  w[1](1, 0) = 1.0;
  CHECK(torsion_residual(r3.coframe, w, r3.chart, x) < 1e-12);
  CHECK(levi_difference_mod_kernel(r3.coframe, r3.alpha, x, levi_connection_solve(r3.coframe, r3.alpha, r3.chart, x), w) <
        1e-8);
  const Mat G = w[1].cast<cplx>();
  const Vec v0 = Vec::Random(2);
  const TransportResult half = transport_generator([&](double) { return G; }, 0.0, M_PI, 16384, v0);
  CHECK((half.psi + v0).norm() < 1e-8);
  const TransportResult r = transport_generator([&](double) { return G; }, 0.0, 2.0 * M_PI, 32768, v0);
  CHECK((r.psi - v0).norm() < 1e-8);
}

TEST_CASE("charges") {
  const ModelInstance ho = hamsys_model(harmonic_oscillator(), 1.0, 16);
  const auto pts = sample_points(ho.chart, RVec::Constant(3, -1), RVec::Constant(3, 1), 20, 4);
  const Polynomial H = harmonic_oscillator();
  const double r = charge_commutation_check(
      ho.conn, [&](const RVec& x) { return hamsys_charge(H, 1.0, 16, x); },
      [&](const RVec& x, int k) { return hamsys_charge_derivative(H, 1.0, 16, x, k); }, pts);
  CHECK(r < 1e-8);
  const Mat c = 2.5 * Mat::Identity(16, 16);
  CHECK(charge_commutation_check(ho.conn, [&](const RVec&) { return c; }, nullptr, pts) == 0.0);
  const ModelInstance d = darboux_model(1, 1.0, 16);
  const Mat s1 = fock_rep(16, 1.0).s1;
  CHECK(charge_commutation_check(d.conn, [&](const RVec&) { return s1; }, nullptr, pts) > 1e-3);
}

TEST_CASE("equivariance of an hbar-independent connection") {
  const Chart c = plain_chart();
  const Mat K = I * fock_rep(3, 1.0).s1;
  EquivarianceInput in;
  in.family = [&](double hb) {
    QuantumConnection q = zero_connection(c, 3);
    q.hbar = hb;
    q.coeff = [K](const RVec&, int i) { return i == 1 ? K : Mat(Mat::Zero(3, 3)); };
    q.grade0 = [](const RVec&, int) { return Mat(Mat::Zero(3, 3)); };
    return q;
  };
  in.X = constant_field(Rank::Vector, v3(1, 0, 0));
  in.U = constant_field(Rank::Vector, v3(0, 1, 0));
  in.A = constant_field(Rank::OneForm, v3(0, 0, 1));
  CHECK(equivariance_residual(in, v3(0.2, 0.3, 0.4), 1.0) < 1e-12);
  in.A = constant_field(Rank::OneForm, v3(1, 0, 0));
  CHECK_THROWS_AS(equivariance_residual(in, v3(0.2, 0.3, 0.4), 1.0), InvalidArgument);
}
