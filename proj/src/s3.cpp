#include "cq/s3.hpp"

#include <cmath>

#include "cq/errors.hpp"

namespace cq {

Chart s3_chart() {
  Chart c;
  c.dim = 3;
  c.names = {"psi", "theta1", "theta2"};
  c.domain = [](const RVec& x) { return x(0) > 0.0 && x(0) < M_PI / 2.0; };
  return c;
}

std::vector<ChartField> s3_coframe_forms() {
  auto li = make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    using std::cos, std::sin;
    VecT<T> a(3);
    a << T(0.0), T(2.0) * cos(v(0)) * cos(v(0)), T(2.0) * sin(v(0)) * sin(v(0));
    return a;
  });
  auto lj = make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    using std::cos, std::sin;
    const T s = sin(T(2.0) * v(0)) * sin(v(1) + v(2));
    VecT<T> a(3);
    a << T(2.0) * cos(v(1) + v(2)), s, -s;
    return a;
  });
  auto lk = make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    using std::cos, std::sin;
    const T s = sin(T(2.0) * v(0)) * cos(v(1) + v(2));
    VecT<T> a(3);
    a << T(2.0) * sin(v(1) + v(2)), -s, s;
    return a;
  });
  return {li, lj, lk};
}

double s3_structure_residual(const std::vector<RVec>& points, DerivMethod m) {
  const Chart c = s3_chart();
  const auto l = s3_coframe_forms();
  double worst = 0.0;
  for (const RVec& x : points)
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, k = (a + 2) % 3;
      const RMat d = d_one_form(l[a], c, x, m);
      worst = std::max(worst, (d - wedge(l[b].eval(x), l[k].eval(x))).cwiseAbs().maxCoeff());
    }
  return worst;
}

RVec s3_embed(const RVec& v) {
  RVec p(4);
  p << std::cos(v(0)) * std::cos(v(1)), std::cos(v(0)) * std::sin(v(1)), std::sin(v(0)) * std::cos(v(2)),
      std::sin(v(0)) * std::sin(v(2));
  return p;
}

RMat s3_embed_jacobian(const RVec& v) {
  const double c = std::cos(v(0)), s = std::sin(v(0));
  RMat j(4, 3);
  j << -s * std::cos(v(1)), -c * std::sin(v(1)), 0.0,  //
      -s * std::sin(v(1)), c * std::cos(v(1)), 0.0,    //
      c * std::cos(v(2)), 0.0, -s * std::sin(v(2)),    //
      c * std::sin(v(2)), 0.0, s * std::cos(v(2));
  return j;
}

S3Operators s3_operators(double hbar, int dim, bool clamp, bool wrong_sign) {
  if (!clamp && !wrong_sign && dim > static_cast<int>(std::floor(2.0 / hbar + 1e-9)))
    throw InvalidArgument("s3_operators: dim exceeds 2/hbar without clamping");
  const FockOps f = fock_rep(dim, hbar);
  const Mat id = Mat::Identity(dim, dim);
  S3Operators o;
  o.hbar = hbar;
  o.Li = id - f.number_op - 0.5 * hbar * id;
  const double sgn = wrong_sign ? 1.0 : -1.0;
  o.E = spectral_sqrt(id + sgn * 0.5 * (f.number_op + hbar * id), clamp) * f.a;
  o.Ed = o.E.adjoint();
  o.Lk = (o.E + o.Ed) / std::sqrt(2.0);
  o.Lj = I * (o.Ed - o.E) / std::sqrt(2.0);
  return o;
}

double su2_residual(const S3Operators& o) {
  const double h = o.hbar;
  const double r1 = (I * h * o.Li + commutator(o.Lj, o.Lk)).norm();
  const double r2 = (I * h * o.Lj + commutator(o.Lk, o.Li)).norm();
  const double r3 = (I * h * o.Lk + commutator(o.Li, o.Lj)).norm();
  return std::max({r1, r2, r3});
}

double casimir_residual(const S3Operators& o) {
  const auto n = o.Li.rows();
  const double j = 0.5 * static_cast<double>(n - 1);
  const Mat c = o.Li * o.Li + o.Lj * o.Lj + o.Lk * o.Lk;
  return (c - o.hbar * o.hbar * j * (j + 1.0) * Mat::Identity(n, n)).norm();
}

ModelInstance s3_strict_model(double hbar, int fock_dim, bool clamp, bool wrong_sign) {
  ModelInstance m;
  m.name = wrong_sign ? "s3-strict-wrong-sign" : "s3-strict";
  m.hbar = hbar;
  m.chart = s3_chart();
  const auto l = s3_coframe_forms();
  m.alpha = l[0];
  m.coframe.e = {l[1], l[2]};
  m.coframe.j = RMat(2, 2);
  m.coframe.j << 0, 1, -1, 0;
  const Chart chart = m.chart;
  // exact su(2) only when dim = 2/hbar; otherwise trust all but the top level
  const bool exact = std::abs(fock_dim * hbar - 2.0) < 1e-9;
  m.family = [=](double hb) {
    const S3Operators o = s3_operators(hb, fock_dim, clamp, wrong_sign);
    QuantumConnection q;
    q.name = m.name;
    q.chart = chart;
    q.rep = fock_rep(fock_dim, hb).rep;
    q.hbar = hb;
    if (!exact || std::abs(hb * fock_dim - 2.0) > 1e-9) q.interior = fock_interior(fock_dim, 1);
    const std::vector<Mat> L{o.Li / (I * hb), o.Lj / (I * hb), o.Lk / (I * hb)};
    q.coeff = [=](const RVec& x, int i) -> Mat {
      Mat out = Mat::Zero(fock_dim, fock_dim);
      for (int a = 0; a < 3; ++a) out += l[a].eval(x)(i) * L[a];
      return out;
    };
    q.dcoeff = [=](const RVec& x, int i, int k) -> Mat {
      Mat out = Mat::Zero(fock_dim, fock_dim);
      for (int a = 0; a < 3; ++a) out += l[a].jacobian(x)(i, k) * L[a];
      return out;
    };
    return q;
  };
  m.conn = m.family(hbar);
  return m;
}

std::vector<TruncationRow> s3_truncation_scan(const std::vector<double>& hbar_grid) {
  std::vector<TruncationRow> rows;
  for (double h : hbar_grid) {
    if (!(h > 0.0 && h <= 4.0)) throw InvalidArgument("s3_truncation_scan: hbar outside (0, 4]");
    TruncationRow r;
    r.hbar = h;
    const int nmax = static_cast<int>(std::ceil(2.0 / h)) + 1;
    for (int n = 0; n <= nmax; ++n)
      if (std::abs(1.0 - h * (n + 1) / 2.0) <= 1e-12) {
        r.level = n;
        break;
      }
    if (r.level) {
      r.dim = *r.level + 1;
      r.spin = 0.5 * *r.level;
      const S3Operators o = s3_operators(h, r.dim + 1, true);
      r.annihilation = (o.Ed * Vec::Unit(r.dim + 1, *r.level)).norm();
    }
    const double c = 1.0 - h / 2.0;
    r.stated_condition = c <= 1e-12 && std::abs(c - std::round(c)) <= 1e-12;
    r.stated_spin = (h - 2.0) / 4.0;
    r.agrees_with_stated = r.level.has_value() == r.stated_condition &&
                          (!r.level || std::abs(r.spin - r.stated_spin) <= 1e-12);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cq
