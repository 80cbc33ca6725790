#include <doctest.h>

#include <cmath>
#include <random>

#include "cq/contractor.hpp"
#include "cq/errors.hpp"
#include "cq/models.hpp"

using namespace cq;

namespace {

RMat j2() {
  RMat j(2, 2);
  j << 0, 1, -1, 0;
  return j;
}

RVec v3(double a, double b, double c) {
  RVec x(3);
  x << a, b, c;
  return x;
}

Contractor make(double p, double m1, double m2, double m, double w) {
  Contractor c;
  c.plus = p;
  c.mid = RVec(2);
  c.mid << m1, m2;
  c.minus = m;
  c.weight = w;
  return c;
}

double diff(const Contractor& a, const Contractor& b) {
  return std::abs(a.plus - b.plus) + (a.mid - b.mid).norm() + std::abs(a.minus - b.minus);
}

ContractorConnectionData data_for(const ModelInstance& m, const RVec& q = RVec()) {
  ContractorConnectionData cd;
  cd.chart = m.chart;
  cd.alpha = m.alpha;
  cd.coframe = m.coframe;
  cd.omega = [m](const RVec& x) { return levi_connection_solve(m.coframe, m.alpha, m.chart, x); };
  const int dim = m.chart.dim, rank = m.coframe.rank();
  cd.P = [dim, rank](const RVec&) { return RMat(RMat::Zero(rank, dim)); };
  const RVec Q = q.size() ? q : RVec(RVec::Zero(dim));
  cd.Q = [Q](const RVec&) { return Q; };
  return cd;
}

ContractorField constant_tractor(double p, const RVec& mid, double m, int dim) {
  ContractorField V;
  V.plus = constant_field(Rank::Scalar, RVec::Constant(1, p));
  V.mid = constant_field(Rank::Vector, mid);
  V.minus = constant_field(Rank::Scalar, RVec::Constant(1, m));
  V.plus.dim = V.mid.dim = V.minus.dim = dim;
  return V;
}

template <class F>
ChartField scalar_field(F f) {
  return make_field(Rank::Scalar, 3, [f](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> o(1);
    o(0) = f(v);
    return o;
  });
}

}  // namespace

TEST_CASE("identity rescale and canonical tractor") {
  const Contractor c = make(0.3, -0.2, 0.5, 1.1, 0.7);
  CHECK(diff(rescale_contractor(c, identity_rescale(j2())), c) == 0.0);
  const Contractor X = make(0, 0, 0, 1, 1);
  RMat M(2, 2);
  M << 2, 0, 0.3, 0.5;
  const RescaleData d = make_rescale_data(3.7, RVec::Ones(2), -0.4, M, j2());
  CHECK(diff(rescale_contractor(X, d), X) < 1e-15);
  RMat bad = RMat::Identity(2, 2);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(rescale_contractor(c, make_rescale_data(1.0, RVec::Zero(2), 0.0, bad, j2())), NotSymplectic);
  CHECK_THROWS_AS(rescale_contractor(c, make_rescale_data(-1.0, RVec::Zero(2), 0.0, RMat::Identity(2, 2), j2())),
                  InvalidArgument);
}

TEST_CASE("weights scale the slots by Omega^w") {
  const double Om = 1.7, w = -0.6;
  const Contractor c = make(1, 0, 0, 0, w);
  const RescaleData d = make_rescale_data(Om, RVec::Zero(2), 0.0, RMat::Identity(2, 2), j2());
  CHECK(rescale_contractor(c, d).plus == doctest::Approx(std::pow(Om, w + 1.0)));
  const Contractor m = make(0, 0, 0, 1, w);
  CHECK(rescale_contractor(m, d).minus == doctest::Approx(std::pow(Om, w - 1.0)));
}

TEST_CASE("unipotent shears cancel") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const RVec ups = RVec::Random(2);
    const double chi = u(rng);
    const Contractor c = make(u(rng), u(rng), u(rng), u(rng), 0.0);
    const RMat id = RMat::Identity(2, 2);
    const Contractor back = rescale_contractor(rescale_contractor(c, make_rescale_data(1.0, ups, chi, id, j2())),
                                               make_rescale_data(1.0, -ups, -chi, id, j2()));
    CHECK(diff(back, c) < 1e-10);
  }
}

TEST_CASE("pairing") {
  const Contractor U = make(1, 0, 0, 0, 1), V = make(0, 0, 0, 1, -1);
  const Density d = pairing_J(U, V, j2());
  CHECK(d.value == 1.0);
  CHECK(d.weight == 0.0);
  const Contractor W = make(0.4, 1.0, -2.0, 0.3, 0.5);
  CHECK(pairing_J(W, W, j2()).value == 0.0);
  // phi(u, v) through j
  CHECK(pairing_J(make(0, 1, 0, 0, 0), make(0, 0, 1, 0, 0), j2()).value == 1.0);
  Contractor other = W;
  other.scale = "alpha'";
  CHECK_THROWS_AS(pairing_J(W, other, j2()), InvalidArgument);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    RMat M(2, 2);
    M(0, 0) = 1.0 + 0.5 * u(rng);
    M(0, 1) = u(rng);
    M(1, 0) = u(rng);
    M(1, 1) = (1.0 + M(0, 1) * M(1, 0)) / M(0, 0);
    const RescaleData d = make_rescale_data(std::exp(u(rng)), RVec::Random(2), u(rng), M, j2());
    const double w = u(rng);
    const Contractor a = make(u(rng), u(rng), u(rng), u(rng), w), b = make(u(rng), u(rng), u(rng), u(rng), -w);
    const double before = pairing_J(a, b, j2()).value;
    CHECK(std::abs(pairing_J(rescale_contractor(a, d), rescale_contractor(b, d), j2()).value - before) < 1e-9);
  }
}

TEST_CASE("cocycle with Omega_1 = e^z, Omega_2 = e^{r^2/4}") {
  const ModelInstance r3 = r3_model(1.0, 4);
  const auto ez = scalar_field([](const auto& v) { using std::exp; return exp(v(2)); });
  const auto er = scalar_field([](const auto& v) {
    using std::exp;
    using T = std::decay_t<decltype(v(0))>;
    return exp(v(0) * v(0) / T(4.0));
  });
  const auto both = scalar_field([](const auto& v) {
    using std::exp;
    using T = std::decay_t<decltype(v(0))>;
    return exp(v(2) + v(0) * v(0) / T(4.0));
  });
  // rescaled contact form e^{2z} alpha and coframe e^z (dr, r dtheta)
  const ChartField alpha2 = make_field(Rank::OneForm, 3, [](const auto& v) {
    using std::exp;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    const T w = exp(T(2.0) * v(2));
    VecT<T> o(3);
    o << T(0.0), w * T(0.5) * v(0) * v(0), -w;
    return o;
  });
  Coframe f2;
  f2.j = r3.coframe.j;
  f2.e.push_back(make_field(Rank::OneForm, 3, [](const auto& v) {
    using std::exp;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> o(3);
    o << exp(v(2)), T(0.0), T(0.0);
    return o;
  }));
  f2.e.push_back(make_field(Rank::OneForm, 3, [](const auto& v) {
    using std::exp;
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> o(3);
    o << T(0.0), exp(v(2)) * v(0), T(0.0);
    return o;
  }));
  const RMat id = RMat::Identity(2, 2);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const RVec& x : {v3(1.0, 0.3, 0.2), v3(0.6, 2.0, -0.5), v3(1.8, 4.0, 0.9)}) {
    const RescaleData d1 = rescale_data_at(ez, r3.alpha, r3.coframe, r3.chart, x, id);
    CHECK(d1.chi == doctest::Approx(-1.0));
    const RescaleData d2 = rescale_data_at(er, alpha2, f2, r3.chart, x, id);
    const RescaleData d12 = rescale_data_at(both, r3.alpha, r3.coframe, r3.chart, x, id);
    for (double w : {0.0, 1.0, -0.5}) {
      const Contractor c = make(u(rng), u(rng), u(rng), u(rng), w);
      CHECK(diff(rescale_successive(c, d1, d2), rescale_contractor(c, d12)) < 1e-8);
    }
  }
}

TEST_CASE("D operator") {
  const ModelInstance r3 = r3_model(1.0, 4);
  const RVec x = v3(1.4, 0.2, 0.7);
  const CoContractor c = d_operator(constant_field(Rank::Scalar, RVec::Constant(1, 2.0)), 0.0, r3.alpha, r3.chart, x);
  CHECK(c.top == 0.0);
  CHECK(c.mid.norm() == 0.0);
  CHECK(c.bottom == 0.0);
  const CoContractor w = d_operator(constant_field(Rank::Scalar, RVec::Constant(1, 2.0)), 1.5, r3.alpha, r3.chart, x);
  CHECK(w.bottom == doctest::Approx(3.0));
  CHECK(w.weight == doctest::Approx(0.5));

  const auto z = scalar_field([](const auto& v) { return v(2); });
  const CoContractor d = d_operator(z, 0.0, r3.alpha, r3.chart, x);
  CHECK(d.top == doctest::Approx(-0.5));
  CHECK((d.mid - v3(0, 0.5 * 1.4 * 1.4, 0)).norm() < 1e-12);
  CHECK(d.bottom == 0.0);
}

TEST_CASE("contractor connection on constant tractors") {
  const ModelInstance r3 = r3_model(1.0, 4);
  const ContractorConnectionData cd = data_for(r3);
  const RVec x = v3(1.0, 0.0, 0.0);
  const ContractorField X = constant_tractor(0, RVec::Zero(2), 1, 3);
  // z in the distribution: (0, zbar, 0)
  const RVec zd = v3(0.3, 0.4, 0.2);  // alpha(zd) = 0.5 * 0.4 - 0.2 = 0
  const Contractor a = connection_apply(cd, zd, X, x);
  CHECK(std::abs(a.plus) < 1e-12);
  CHECK((a.mid - Eigen::Vector2d(0.3, 0.4)).norm() < 1e-12);
  CHECK(std::abs(a.minus) < 1e-12);
  // general z: top 2 alpha(z), middle the distribution projection
  const RVec z = v3(0.3, 0.4, 1.0);
  const Contractor b = connection_apply(cd, z, X, x);
  CHECK(b.plus == doctest::Approx(2.0 * (0.2 - 1.0)));
  CHECK((b.mid - Eigen::Vector2d(0.3, 0.4)).norm() < 1e-12);
  CHECK(std::abs(b.minus) < 1e-12);
  ContractorField missing = X;
  missing.mid.eval = nullptr;
  CHECK_THROWS_AS(connection_apply(cd, z, missing, x), InvalidArgument);
}

TEST_CASE("scale tractors are parallel for the defining scale") {
  const ModelInstance d = darboux_model(1, 1.0, 3);
  const ChartField one = constant_field(Rank::Scalar, RVec::Ones(1));
  const auto pts = sample_points(d.chart, RVec::Constant(3, -1), RVec::Constant(3, 1), 10, 3);
  CHECK(parallel_scale_check(data_for(d), one, pts) < 1e-9);

  const ModelInstance r3 = r3_model(1.0, 4);
  const auto rp = sample_points(r3.chart, v3(0.5, 0, -1), v3(2, 6, 1), 10, 3);
  CHECK(parallel_scale_check(data_for(r3), one, rp) < 1e-8);

  // Q != 0: the bottom slot picks up Q_z sigma / 2
  const RVec q = v3(0.3, 0.0, 0.0);
  const double r = parallel_scale_check(data_for(d, q), one, pts);
  CHECK(r >= 0.15 - 1e-9);
}

TEST_CASE("parabolic lifts") {
  const auto psi = make_parabolic_grid(128, 10, 128, 10, [](double y, double x) {
    return cplx(std::exp(-0.5 * (y * y + x * x)), 0.0);
  });
  CHECK(projective_distance(psi.samples, parabolic_lift(ParabolicData{}, psi).samples) < 1e-12);
  const auto chirp = parabolic_lift(ParabolicData{1.0, 0.0, 0.0, 0.7}, psi);
  CHECK((chirp.samples.cwiseAbs() - psi.samples.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-10);
  // phase exp(-i chi y^2 / 4)
  const int i = 80, k = 64;
  const double y = psi.y(i);
  CHECK(std::abs(chirp.samples(i, k) / psi.samples(i, k) - std::exp(-I * 0.7 * y * y / 4.0)) < 1e-10);

  const ParabolicData d1{1.2, 0.3, -0.2, 0.1}, d2{0.9, -0.1, 0.25, -0.15};
  CHECK(std::abs(l2_norm(parabolic_lift(d1, psi)) / l2_norm(psi) - 1.0) < 1e-6);
  const Mat lhs = parabolic_lift(d1, parabolic_lift(d2, psi)).samples;
  CHECK(projective_distance(parabolic_lift(compose_parabolic(d1, d2), psi).samples, lhs) < 1e-4);

  const ParabolicData e = compose_parabolic(ParabolicData{}, d1);
  CHECK(e.Omega == d1.Omega);
  CHECK(e.a == d1.a);
  CHECK(e.chi == d1.chi);
  CHECK_THROWS_AS(parabolic_from(identity_rescale(RMat::Identity(4, 4))), InvalidArgument);
}
