#include <doctest.h>

#include <cmath>

#include "cq/errors.hpp"
#include "cq/geometry.hpp"
#include "cq/models.hpp"
#include "cq/s3.hpp"

using namespace cq;

namespace {

RVec v3(double a, double b, double c) {
  RVec x(3);
  x << a, b, c;
  return x;
}

}  // namespace

TEST_CASE("exterior derivative of simple forms") {
  Chart c;
  c.names = {"r", "theta", "z"};
  const ChartField dth = constant_field(Rank::OneForm, RVec::Unit(3, 1));
  CHECK(d_one_form(dth, c, v3(1, 2, 3)).norm() == 0.0);
  const ChartField zdth = make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(3);
    a << T(0.0), v(2), T(0.0);
    return a;
  });
  for (DerivMethod m : {DerivMethod::Analytic, DerivMethod::FiniteDifference}) {
    const RMat F = d_one_form(zdth, c, v3(0.4, 1.0, -0.3), m);
    CHECK(F(2, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(F(1, 2) == doctest::Approx(-1.0).epsilon(1e-9));
  }
  const ChartField scalar = make_field(Rank::Scalar, 3, [](const auto& v) {
    using std::sin;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(1);
    a << v(0) * v(0) * sin(v(1));
    return a;
  });
  const RVec g = exterior_derivative(scalar, c, v3(1.5, 0.2, 0.0));
  CHECK(g(0) == doctest::Approx(3.0 * std::sin(0.2)));
  CHECK(g(1) == doctest::Approx(2.25 * std::cos(0.2)));
  CHECK(g(2) == 0.0);
}

TEST_CASE("d lambda_i picks up -2 sin 2psi") {
  const Chart c = s3_chart();
  const auto l = s3_coframe_forms();
  const RVec x = v3(0.5, 0.3, 0.7);
  for (DerivMethod m : {DerivMethod::Analytic, DerivMethod::FiniteDifference}) {
    const RMat F = d_one_form(l[0], c, x, m);
    CHECK(std::abs(F(0, 1) + 2.0 * std::sin(1.0)) < 1e-8);
    CHECK(std::abs(F(0, 2) - 2.0 * std::sin(1.0)) < 1e-8);
  }
}

TEST_CASE("finite differences agree with automatic differentiation") {
  const Chart c = s3_chart();
  const auto l = s3_coframe_forms();
  const auto pts = sample_points(c, v3(0.1, 0, 0), v3(1.4, 6.2, 6.2), 20, 7);
  for (const ChartField& f : l)
    for (const RVec& x : pts) {
      const RMat a = d_one_form(f, c, x), b = d_one_form(f, c, x, DerivMethod::FiniteDifference);
      CHECK((a - b).cwiseAbs().maxCoeff() < 10.0 * c.h * c.h + 1e-9);
      CHECK(dd_residual(f, c, x) < 1e-6);
    }
}

TEST_CASE("wedge, interior and lie") {
  const RVec a = v3(1, 2, 3), b = v3(-1, 0, 4);
  CHECK(wedge(a, a).norm() == 0.0);
  CHECK((wedge(a, b) + wedge(b, a)).norm() == 0.0);
  CHECK(interior(v3(1, 0, 0), a) == 1.0);
  // iota_v (a ^ b) = a(v) b - b(v) a
  const RVec v = v3(0.5, -1, 2);
  CHECK((interior(v, wedge(a, b)) - (a.dot(v) * b - b.dot(v) * a)).norm() < 1e-14);

  const Chart c = s3_chart();
  const auto l = s3_coframe_forms();
  const ChartField rho = constant_field(Rank::Vector, v3(0, 1, 1));
  for (const RVec& x : sample_points(c, v3(0.1, 0, 0), v3(1.4, 6.2, 6.2), 50, 3)) {
    CHECK(interior(rho.eval(x), d_one_form(l[0], c, x)).norm() < 1e-8);
    CHECK(lie_derivative(rho, l[0], c, x).norm() < 1e-10);
  }
  // L_{d_theta} lambda_j rotates (lambda_j, lambda_k) at unit rate in the sum angle
  const ChartField t1 = constant_field(Rank::Vector, v3(0, 1, 0));
  const RVec x = v3(0.6, 0.2, 0.9);
  CHECK((lie_derivative(t1, l[1], c, x) + l[2].eval(x)).norm() < 1e-10);
}

TEST_CASE("reeb vectors of the shipped forms") {
  const ModelInstance r3 = r3_model(1.0, 4);
  for (DerivMethod m : {DerivMethod::Analytic, DerivMethod::FiniteDifference}) {
    CHECK((reeb_vector(r3.alpha, r3.chart, v3(1.3, 0.4, 2.0), m) - v3(0, 0, -1)).norm() < 1e-8);
  }
  const ModelInstance d = darboux_model(1, 1.0, 4);
  CHECK((reeb_vector(d.alpha, d.chart, v3(0.2, -0.7, 1.0)) - v3(0, 0, -1)).norm() < 1e-12);

  const Chart c = s3_chart();
  const auto l = s3_coframe_forms();
  const RVec x = v3(0.5, 0.3, 0.7);
  const RVec rho = reeb_vector(l[0], c, x);
  CHECK((rho - v3(0, 0.5, 0.5)).norm() < 1e-12);
  CHECK(l[0].eval(x).dot(rho) == doctest::Approx(1.0));
  CHECK(l[0].eval(x).dot(v3(0, 1, 1)) == doctest::Approx(2.0));

  const ChartField closed = constant_field(Rank::OneForm, v3(0, 0, 1));
  CHECK_THROWS_AS(reeb_vector(closed, r3.chart, v3(1, 0, 0)), DegenerateContactForm);
}

TEST_CASE("musical maps") {
  const ModelInstance r3 = r3_model(1.0, 4);
  const RVec x = v3(1, 0, 0);
  // phi = r dr ^ dtheta at r = 1; sharp(dr) solves phi(v, .) = dr with alpha(v) = 0
  const RVec v = sharp(v3(1, 0, 0), r3.alpha, r3.chart, x);
  CHECK((v - v3(0, -1, -0.5)).norm() < 1e-12);
  CHECK((flat(v, r3.alpha, r3.chart, x) - v3(1, 0, 0)).norm() < 1e-12);
  CHECK(sharp(RVec::Zero(3), r3.alpha, r3.chart, x).norm() == 0.0);
  const RVec y = v3(1.7, 0.3, -1.0);
  const RVec u = v3(0.3, -0.4, 0.5 * 1.7 * 1.7 * -0.4);  // alpha(u) = 0
  CHECK((sharp(flat(u, r3.alpha, r3.chart, y), r3.alpha, r3.chart, y) - u).norm() < 1e-10);
  CHECK_THROWS_AS(flat(v3(0, 0, 1), r3.alpha, r3.chart, y), NotInDistribution);
  CHECK_THROWS_AS(sharp(v3(0, 0, 1), r3.alpha, r3.chart, y), NotInDistribution);
}

TEST_CASE("structure equations") {
  const ModelInstance d = darboux_model(2, 1.0, 3);
  RVec lo = RVec::Constant(5, -1), hi = RVec::Constant(5, 1);
  CHECK(structure_residual(d.coframe, d.alpha, d.chart, sample_points(d.chart, lo, hi, 10, 1)) == 0.0);

  Coframe s3;
  const auto l = s3_coframe_forms();
  s3.e = {l[1], l[2]};
  s3.j = RMat(2, 2);
  s3.j << 0, 1, -1, 0;
  const auto pts = sample_points(s3_chart(), v3(0.1, 0, 0), v3(1.4, 6.2, 6.2), 100, 5);
  CHECK(structure_residual(s3, l[0], s3_chart(), pts) < 1e-8);
  CHECK(s3_structure_residual(pts) < 1e-12);
  CHECK(s3_structure_residual(pts, DerivMethod::FiniteDifference) < 1e-8);
}

TEST_CASE("levi connection solve") {
  const ModelInstance d = darboux_model(1, 1.0, 3);
  const ConnectionForm wd = levi_connection_solve(d.coframe, d.alpha, d.chart, v3(0.1, 0.2, 0.3));
  for (const RMat& m : wd) CHECK(m.norm() < 1e-12);

  // S^3: omega^1_2 = alpha up to the totally symmetric kernel
  Coframe s3;
  const auto l = s3_coframe_forms();
  s3.e = {l[1], l[2]};
  s3.j = RMat(2, 2);
  s3.j << 0, 1, -1, 0;
  const RVec x = v3(0.7, 0.4, 1.1);
  const ConnectionForm w = levi_connection_solve(s3, l[0], s3_chart(), x);
  CHECK(torsion_residual(s3, w, s3_chart(), x) < 1e-8);
  ConnectionForm expect(3, RMat::Zero(2, 2));
  const RVec a = l[0].eval(x);
  for (int k = 0; k < 3; ++k) {
    expect[k](0, 1) = a(k);
    expect[k](1, 0) = -a(k);
  }
  CHECK(torsion_residual(s3, expect, s3_chart(), x) < 1e-8);
  CHECK(levi_difference_mod_kernel(s3, l[0], x, w, expect) < 1e-8);

  // R^3 frames (dr, r dtheta): omega^2_1 = dtheta
  const ModelInstance r3 = r3_model(1.0, 4);
  const RVec y = v3(1.0, 0.3, 0.0);
  const ConnectionForm wr = levi_connection_solve(r3.coframe, r3.alpha, r3.chart, y);
  ConnectionForm er(3, RMat::Zero(2, 2));
  er[1](0, 1) = -1.0;
  er[1](1, 0) = 1.0;
  CHECK(torsion_residual(r3.coframe, er, r3.chart, y) < 1e-12);
  CHECK(levi_difference_mod_kernel(r3.coframe, r3.alpha, y, wr, er) < 1e-8);
}

TEST_CASE("rescale decomposition") {
  const ModelInstance r3 = r3_model(1.0, 4);
  const RVec x = v3(1.2, 0.5, 0.3);
  const ChartField one = constant_field(Rank::Scalar, RVec::Ones(1));
  const RescaleDecomposition d0 = rescale_decompose(one, r3.alpha, r3.chart, x);
  CHECK(d0.upsilon.norm() == 0.0);
  CHECK(d0.chi == 0.0);

  const ChartField ez = make_field(Rank::Scalar, 3, [](const auto& v) {
    using std::exp;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(1);
    a << exp(v(2));
    return a;
  });
  const RescaleDecomposition d1 = rescale_decompose(ez, r3.alpha, r3.chart, x);
  CHECK(d1.chi == doctest::Approx(-1.0));
  CHECK((d1.upsilon - v3(0.0, 0.5 * x(0) * x(0), 0.0)).norm() < 1e-12);

  const ChartField er = make_field(Rank::Scalar, 3, [](const auto& v) {
    using std::exp;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(1);
    a << exp(v(0) * v(0) / T(4.0));
    return a;
  });
  const RescaleDecomposition d2 = rescale_decompose(er, r3.alpha, r3.chart, x);
  CHECK(std::abs(d2.chi) < 1e-14);
  CHECK(std::abs(d2.upsilon.dot(reeb_vector(r3.alpha, r3.chart, x))) < 1e-10);

  const ChartField neg = constant_field(Rank::Scalar, -RVec::Ones(1));
  CHECK_THROWS_AS(rescale_decompose(neg, r3.alpha, r3.chart, x), InvalidArgument);
}

TEST_CASE("sampling is deterministic and stays in the domain") {
  const Chart c = s3_chart();
  const auto a = sample_points(c, v3(0.1, 0, 0), v3(1.4, 1, 1), 30, 11);
  const auto b = sample_points(c, v3(0.1, 0, 0), v3(1.4, 1, 1), 30, 11);
  REQUIRE(a.size() == 30);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(c.domain(a[i]));
  }
  CHECK_THROWS_AS(c.require(v3(2.0, 0, 0)), OutsideDomain);
}
