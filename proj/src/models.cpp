#include "cq/models.hpp"

#include <cmath>

#include "cq/errors.hpp"

namespace cq {

std::vector<int> fock_interior(int dim, int margin, int modes) {
  std::vector<int> out;
  int total = 1;
  for (int m = 0; m < modes; ++m) total *= dim;
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    bool keep = true;
    for (int m = 0; m < modes; ++m) {
      if (rest % dim >= dim - margin) keep = false;
      rest /= dim;
    }
    if (keep) out.push_back(idx);
  }
  return out;
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op acting on mode m of an n-mode product
Mat on_mode(const Mat& op, int m, int n) {
  const auto d = op.rows();
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == m ? op : Mat(Mat::Identity(d, d)));
  return out;
}

Mat identity(int n) { return Mat::Identity(n, n); }

}  // namespace

ModelInstance darboux_model(int n, double hbar, int fock_dim) {
  if (n < 1) throw InvalidArgument("darboux_model: n must be at least 1");
  if (!(hbar > 0.0)) throw InvalidArgument("darboux_model: hbar must be positive");
  ModelInstance m;
  m.name = "darboux";
  m.hbar = hbar;
  const int dim = 2 * n + 1;
  m.chart.dim = dim;
  for (int a = 0; a < n; ++a) m.chart.names.push_back("x" + std::to_string(a + 1));
  for (int a = 0; a < n; ++a) m.chart.names.push_back("p" + std::to_string(a + 1));
  m.chart.names.push_back("t");
  m.alpha = make_field(Rank::OneForm, dim, [n, dim](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a = VecT<T>::Zero(dim);
    for (int k = 0; k < n; ++k) a(k) = v(n + k);
    a(2 * n) = T(-1.0);
    return a;
  });
  // (dp_1..dp_n, dx_1..dx_n)
  for (int k = 0; k < 2 * n; ++k) {
    const int coord = k < n ? n + k : k - n;
    RVec c = RVec::Zero(dim);
    c(coord) = 1.0;
    m.coframe.e.push_back(constant_field(Rank::OneForm, c));
  }
  m.coframe.j = RMat::Zero(2 * n, 2 * n);
  m.coframe.j.topRightCorner(n, n) = RMat::Identity(n, n);
  m.coframe.j.bottomLeftCorner(n, n) = -RMat::Identity(n, n);

  const FockOps f = fock_rep(fock_dim, 1.0);
  std::vector<Mat> s, p;
  for (int a = 0; a < n; ++a) {
    s.push_back(on_mode(f.s2, a, n));
    p.push_back(on_mode(f.s1, a, n));
  }
  const int size = static_cast<int>(s[0].rows());
  const std::vector<int> interior = fock_interior(fock_dim, 1, n);

  m.family = [=](double hb) {
    QuantumConnection q;
    q.name = "darboux";
    q.chart = m.chart;
    q.rep = f.rep;
    q.rep.dim = size;
    q.rep.hbar = hb;
    q.hbar = hb;
    q.interior = interior;
    const double sh = std::sqrt(hb);
    q.coeff = [=](const RVec& x, int i) -> Mat {
      if (i < n) return Mat(x(n + i) / (I * hb) * identity(size) + (I / sh) * p[i]);
      if (i < 2 * n) return Mat(s[i - n] / (I * sh));
      return Mat(I / hb * identity(size));
    };
    q.dcoeff = [=](const RVec&, int i, int k) -> Mat {
      if (i < n && k == n + i) return Mat(identity(size) / (I * hb));
      return Mat::Zero(size, size);
    };
    q.grade_m1 = [=](const RVec&, int i) -> Mat {
      if (i < n) return Mat((I / sh) * p[i]);
      if (i < 2 * n) return Mat(s[i - n] / (I * sh));
      return Mat::Zero(size, size);
    };
    q.grade0 = [=](const RVec&, int) -> Mat { return Mat::Zero(size, size); };
    q.calibration = [=](const RVec&) {
      std::vector<Mat> out;
      for (int a = 0; a < n; ++a) out.push_back(s[a]);
      for (int a = 0; a < n; ++a) out.push_back(-p[a]);
      return out;
    };
    return q;
  };
  m.conn = m.family(hbar);
  return m;
}

Mat r3_s_minus(const FockOps& f, double theta) { return std::sin(theta) * f.s2 - std::cos(theta) * f.s1; }
Mat r3_s_plus(const FockOps& f, double theta) { return -std::sin(theta) * f.s1 - std::cos(theta) * f.s2; }

ModelInstance r3_model(double hbar, int fock_dim, bool drop_omega) {
  if (!(hbar > 0.0)) throw InvalidArgument("r3_model: hbar must be positive");
  ModelInstance m;
  m.name = drop_omega ? "r3-no-omega" : "r3";
  m.hbar = hbar;
  m.chart.dim = 3;
  m.chart.names = {"r", "theta", "z"};
  m.chart.domain = [](const RVec& x) { return x(0) > 0.0; };
  m.alpha = make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(3);
    a << T(0.0), T(0.5) * v(0) * v(0), T(-1.0);
    return a;
  });
  m.coframe.e.push_back(constant_field(Rank::OneForm, RVec::Unit(3, 0)));
  m.coframe.e.push_back(make_field(Rank::OneForm, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(3);
    a << T(0.0), v(0), T(0.0);
    return a;
  }));
  m.coframe.j = RMat(2, 2);
  m.coframe.j << 0, 1, -1, 0;

  const FockOps f = fock_rep(fock_dim, 1.0);
  const Mat osc = drop_omega ? Mat(Mat::Zero(fock_dim, fock_dim)) : Mat((f.s2 * f.s2 + f.s1 * f.s1) / I);
  const std::vector<int> interior = fock_interior(fock_dim, 2);
  const int size = fock_dim;
  const Chart chart = m.chart;

  m.family = [=](double hb) {
    QuantumConnection q;
    q.name = drop_omega ? "r3-no-omega" : "r3";
    q.chart = chart;
    q.rep = f.rep;
    q.rep.hbar = hb;
    q.hbar = hb;
    q.interior = interior;
    const cplx g = 1.0 / (I * std::sqrt(hb));
    q.coeff = [=](const RVec& x, int i) -> Mat {
      const double r = x(0), th = x(1);
      switch (i) {
        case 0: return g * r3_s_minus(f, th);
        case 1: return Mat(r * r / (2.0 * I * hb) * identity(size) + g * r * r3_s_plus(f, th) + osc);
        default: return Mat(I / hb * identity(size));
      }
    };
    q.dcoeff = [=](const RVec& x, int i, int k) -> Mat {
      const double r = x(0), th = x(1);
      if (i == 0 && k == 1) return -g * r3_s_plus(f, th);
      if (i == 1 && k == 0) return Mat(r / (I * hb) * identity(size) + g * r3_s_plus(f, th));
      if (i == 1 && k == 1) return g * r * r3_s_minus(f, th);
      return Mat::Zero(size, size);
    };
    q.grade_m1 = [=](const RVec& x, int i) -> Mat {
      if (i == 0) return g * r3_s_minus(f, x(1));
      if (i == 1) return g * x(0) * r3_s_plus(f, x(1));
      return Mat::Zero(size, size);
    };
    q.grade0 = [=](const RVec&, int i) -> Mat { return i == 1 ? osc : Mat(Mat::Zero(size, size)); };
    q.calibration = [=](const RVec& x) { return std::vector<Mat>{r3_s_minus(f, x(1)), r3_s_plus(f, x(1))}; };
    return q;
  };
  m.conn = m.family(hbar);
  return m;
}

Polynomial poly_d(const Polynomial& p, int dq, int dp) {
  Polynomial out;
  for (const auto& [e, c] : p) {
    auto [i, j] = e;
    if (i < dq || j < dp) continue;
    double f = 1.0;
    for (int k = 0; k < dq; ++k) f *= (i - k);
    for (int k = 0; k < dp; ++k) f *= (j - k);
    out[{i - dq, j - dp}] += c * f;
  }
  return out;
}

Polynomial harmonic_oscillator() { return {{{2, 0}, 0.5}, {{0, 2}, 0.5}}; }

namespace {

Mat shifted_weyl(const Polynomial& H, double hbar, const FockOps& f, double q, double p) {
  return weyl_quantize(poly_shift(H, q, p, std::sqrt(hbar)), f.s2, f.s1);
}

}  // namespace

Mat hamsys_charge(const Polynomial& H, double hbar, int fock_dim, const RVec& x) {
  const FockOps f = fock_rep(fock_dim, 1.0);
  return (I / hbar) * shifted_weyl(H, hbar, f, x(0), x(1));
}

Mat hamsys_charge_derivative(const Polynomial& H, double hbar, int fock_dim, const RVec& x, int k) {
  if (k == 2) return Mat::Zero(fock_dim, fock_dim);
  const FockOps f = fock_rep(fock_dim, 1.0);
  return (I / hbar) * shifted_weyl(poly_d(H, k == 0 ? 1 : 0, k == 1 ? 1 : 0), hbar, f, x(0), x(1));
}

ModelInstance hamsys_model(const Polynomial& H, double hbar, int fock_dim) {
  const int deg = poly_degree(H);
  if (deg > kMaxWeylDegree) throw Unsupported("hamsys_model: degree above 12");
  if (!(hbar > 0.0)) throw InvalidArgument("hamsys_model: hbar must be positive");
  ModelInstance m;
  m.name = "hamsys";
  m.hbar = hbar;
  m.chart.dim = 3;
  m.chart.names = {"q", "p", "t"};
  m.alpha = make_field(Rank::OneForm, 3, [H](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    T h = T(0.0);
    for (const auto& [e, c] : H) {
      T term = T(c.real());
      for (int k = 0; k < e.first; ++k) term = term * v(0);
      for (int k = 0; k < e.second; ++k) term = term * v(1);
      h = h + term;
    }
    VecT<T> a(3);
    a << v(1), T(0.0), -h;
    return a;
  });
  m.coframe.j = RMat(2, 2);
  m.coframe.j << 0, 1, -1, 0;

  const FockOps f = fock_rep(fock_dim, 1.0);
  const std::vector<int> interior = fock_interior(fock_dim, std::max(1, deg));
  const Chart chart = m.chart;
  const Polynomial Hq = poly_d(H, 1, 0), Hp = poly_d(H, 0, 1);
  m.family = [=](double hb) {
    QuantumConnection c;
    c.name = "hamsys";
    c.chart = chart;
    c.rep = f.rep;
    c.rep.hbar = hb;
    c.hbar = hb;
    c.interior = interior;
    const double sh = std::sqrt(hb);
    const Mat id = identity(fock_dim);
    c.coeff = [=](const RVec& x, int i) -> Mat {
      switch (i) {
        case 0: return Mat(-(I / hb) * (x(1) * id + sh * f.s1));
        case 1: return Mat((I / hb) * sh * f.s2);
        default: return Mat((I / hb) * shifted_weyl(H, hb, f, x(0), x(1)));
      }
    };
    c.dcoeff = [=](const RVec& x, int i, int k) -> Mat {
      if (i == 0 && k == 1) return Mat(-(I / hb) * id);
      if (i == 2 && k == 0) return Mat((I / hb) * shifted_weyl(Hq, hb, f, x(0), x(1)));
      if (i == 2 && k == 1) return Mat((I / hb) * shifted_weyl(Hp, hb, f, x(0), x(1)));
      return Mat::Zero(fock_dim, fock_dim);
    };
    return c;
  };
  m.conn = m.family(hbar);
  return m;
}

}  // namespace cq
