#include "cq/ambient.hpp"

#include <cmath>

#include "cq/errors.hpp"

namespace cq {

// ---- generic ambient frame checks ----

int ambient_rank(const AmbientFrameData& d) { return static_cast<int>(d.J.rows()); }

namespace {

template <class F>
auto stencil(const F& f, const RVec& x, int k, double h) -> std::decay_t<decltype(f(x))> {
  auto at = [&](double s) {
    RVec y = x;
    y(k) += s * h;
    return f(y);
  };
  return ((at(-2.0) - at(2.0)) + 8.0 * (at(1.0) - at(-1.0))) / (12.0 * h);
}

// dE[k](A, l) = d_k E^A_l
std::vector<RMat> frame_derivative(const AmbientFrameData& d, const RVec& x) {
  std::vector<RMat> out;
  for (int k = 0; k < d.chart.dim; ++k) out.push_back(stencil(d.E, x, k, d.h));
  return out;
}

}  // namespace

double frame_torsion_residual(const AmbientFrameData& d, const std::vector<RVec>& points) {
  const int n = d.chart.dim, r = ambient_rank(d);
  double worst = 0.0;
  for (const RVec& x : points) {
    const auto dE = frame_derivative(d, x);
    const RMat E = d.E(x);
    const auto W = d.Omega(x);
    for (int A = 0; A < r; ++A)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          double v = dE[k](A, l) - dE[l](A, k);
          for (int B = 0; B < r; ++B) v += W[k](A, B) * E(B, l) - W[l](A, B) * E(B, k);
          worst = std::max(worst, std::abs(v));
        }
  }
  return worst;
}

std::vector<RMat> ambient_curvature(const AmbientFrameData& d, const RVec& x) {
  const int n = d.chart.dim, r = ambient_rank(d);
  const auto W = d.Omega(x);
  std::vector<std::vector<RMat>> dW(n);
  for (int k = 0; k < n; ++k) {
    auto comp = [&](int l) {
      return stencil([&](const RVec& y) { return RMat(d.Omega(y)[l]); }, x, k, d.h);
    };
    for (int l = 0; l < n; ++l) dW[k].push_back(comp(l));
  }
  std::vector<RMat> F(n * n, RMat::Zero(r, r));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) F[k * n + l] = dW[k][l] - dW[l][k] + W[k] * W[l] - W[l] * W[k];
  return F;
}

double iota_x_curvature_residual(const AmbientFrameData& d, const std::vector<RVec>& points) {
  const int n = d.chart.dim;
  double worst = 0.0;
  for (const RVec& x : points) {
    const auto F = ambient_curvature(d, x);
    const RVec X = d.X.eval(x);
    for (int l = 0; l < n; ++l) {
      RMat acc = RMat::Zero(ambient_rank(d), ambient_rank(d));
      for (int k = 0; k < n; ++k) acc += X(k) * F[k * n + l];
      worst = std::max(worst, acc.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double ambient_parallel_residual(const AmbientFrameData& d, const std::function<RVec(const RVec&)>& Ifield,
                                 const std::vector<RVec>& points) {
  double worst = 0.0;
  for (const RVec& x : points) {
    const auto W = d.Omega(x);
    const RVec Iv = Ifield(x);
    for (int k = 0; k < d.chart.dim; ++k) {
      const RVec r = stencil(Ifield, x, k, d.h) + W[k] * Iv;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double lie_x_frames_residual(const AmbientFrameData& d, const RVec& weights, const std::vector<RVec>& points) {
  const int n = d.chart.dim;
  double worst = 0.0;
  for (const RVec& x : points) {
    const auto dE = frame_derivative(d, x);
    const RMat E = d.E(x);
    const RVec X = d.X.eval(x);
    const RMat dX = field_jacobian(d.X, d.chart, x, DerivMethod::Analytic);
    for (int A = 0; A < ambient_rank(d); ++A)
      for (int l = 0; l < n; ++l) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += X(k) * dE[k](A, l) + E(A, k) * dX(k, l);
        worst = std::max(worst, std::abs(v - weights(A) * E(A, l)));
      }
  }
  return worst;
}

double homothety_frame_residual(const AmbientFrameData& d, const std::vector<RVec>& points) {
  double worst = 0.0;
  auto XA = [&](const RVec& y) { return RVec(d.E(y) * d.X.eval(y)); };
  for (const RVec& x : points) {
    const auto W = d.Omega(x);
    const RMat E = d.E(x);
    const RVec xa = XA(x);
    for (int k = 0; k < d.chart.dim; ++k) {
      const RVec r = stencil(XA, x, k, d.h) + W[k] * xa - E.col(k);
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double homothety_residual(const AmbientFrameData& d, const std::vector<RVec>& points) {
  double worst = 0.0;
  for (const RVec& x : points)
    worst = std::max(worst, (lie_derivative(d.X, d.A, d.chart, x) - 2.0 * d.A.eval(x)).cwiseAbs().maxCoeff());
  return worst;
}

Mat quadratic_term(const RMat& omega_v, const RMat& J, const std::vector<Mat>& S) {
  RMat beta = -omega_v * J.inverse();
  beta = 0.5 * (beta + beta.transpose());
  const auto n = S[0].rows();
  Mat out = Mat::Zero(n, n);
  for (std::size_t c = 0; c < S.size(); ++c)
    for (std::size_t d = 0; d < S.size(); ++d)
      if (beta(c, d) != 0.0) out += beta(c, d) * (S[c] * S[d]);
  return out / (2.0 * I);
}

// ---- R^5 ----

std::vector<ChartField> r5_lambda_forms() {
  auto lI = make_field(Rank::OneForm, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(5);
    a << T(-2.0) * v(1), T(2.0) * v(0), T(-2.0) * v(3), T(2.0) * v(2), T(0.0);
    return a;
  });
  auto lJ = make_field(Rank::OneForm, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(5);
    a << T(-2.0) * v(2), T(2.0) * v(3), T(2.0) * v(0), T(-2.0) * v(1), T(0.0);
    return a;
  });
  auto lK = make_field(Rank::OneForm, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(5);
    a << T(-2.0) * v(3), T(-2.0) * v(2), T(2.0) * v(1), T(2.0) * v(0), T(0.0);
    return a;
  });
  return {lI, lJ, lK};
}

ChartField r5_log_r_form() {
  return make_field(Rank::OneForm, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    const T r2 = v(0) * v(0) + v(1) * v(1) + v(2) * v(2) + v(3) * v(3);
    VecT<T> a(5);
    a << v(0) / r2, v(1) / r2, v(2) / r2, v(3) / r2, T(0.0);
    return a;
  });
}

namespace {

double radius(const RVec& x) { return x.head(4).norm(); }

Chart r5_chart() {
  Chart c;
  c.dim = 5;
  c.names = {"x", "y", "z", "w", "u"};
  c.domain = [](const RVec& x) { return x.head(4).norm() > 0.0; };
  return c;
}

RMat sign_j() {
  RMat J = RMat::Zero(4, 4);
  J(0, 3) = -1.0;
  J(1, 2) = 1.0;
  J(2, 1) = -1.0;
  J(3, 0) = 1.0;
  return J;
}

}  // namespace

AmbientFrameData r5_frame_data() {
  AmbientFrameData d;
  d.chart = r5_chart();
  const auto l = r5_lambda_forms();
  const ChartField Y = r5_log_r_form();
  d.A = make_field(Rank::OneForm, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(5);
    a << T(-2.0) * v(1), T(2.0) * v(0), T(-2.0) * v(3), T(2.0) * v(2), T(1.0);
    return a;
  });
  d.X = make_field(Rank::Vector, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(5);
    a << v(0), v(1), v(2), v(3), T(2.0) * v(4);
    return a;
  });
  d.J = sign_j();
  d.E = [l, Y](const RVec& x) {
    const double r = radius(x);
    RMat E(4, 5);
    E.row(0) = 2.0 * l[0].eval(x).transpose();
    E.row(1) = l[1].eval(x).transpose() / r;
    E.row(2) = l[2].eval(x).transpose() / r;
    E.row(3) = Y.eval(x).transpose();
    return E;
  };
  d.Omega = [l, Y](const RVec& x) {
    const double r = radius(x);
    const RVec lI = l[0].eval(x), lJ = l[1].eval(x), lK = l[2].eval(x), y = Y.eval(x);
    std::vector<RMat> W(5, RMat::Zero(4, 4));
    for (int k = 0; k < 5; ++k) {
      RMat& w = W[k];
      w << -y(k), lK(k) / r, -lJ(k) / r, 2.0 * lI(k),  //
          0.0, 0.0, lI(k) / (r * r), lJ(k) / r,         //
          0.0, -lI(k) / (r * r), 0.0, lK(k) / r,        //
          0.0, 0.0, 0.0, y(k);
    }
    return W;
  };
  return d;
}

double r5_curvature_block_residual(const std::vector<RVec>& points) {
  const AmbientFrameData d = r5_frame_data();
  const auto l = r5_lambda_forms();
  double worst = 0.0;
  for (const RVec& x : points) {
    const auto F = ambient_curvature(d, x);
    const double r = radius(x);
    const RMat jk = wedge(l[1].eval(x), l[2].eval(x)) / std::pow(r, 4);
    for (int k = 0; k < 5; ++k)
      for (int m = 0; m < 5; ++m) {
        RMat expect = RMat::Zero(4, 4);
        expect(1, 2) = jk(k, m);
        expect(2, 1) = -jk(k, m);
        worst = std::max(worst, (F[k * 5 + m] - expect).cwiseAbs().maxCoeff());
      }
  }
  return worst;
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct AmbientOps {
  int size = 0;
  RVec xgrid;          // per basis index: grid coordinate
  RVec level;          // per basis index: Fock level
  Mat Sp, Sm, Ad, Am;  // S_+, S_-, A^dagger, A
  Mat SpSm;            // (S_+ S_- + S_- S_+) / 2
  double hbar = 1.0;
};

AmbientOps ambient_ops(double hbar, const AmbientS3Rep& rep) {
  const GridOps g = grid_rep(rep.grid_n, 1.0, -rep.half_width, rep.half_width);
  const FockOps f = fock_rep(rep.fock_dim, 1.0);
  AmbientOps o;
  o.hbar = hbar;
  o.size = rep.grid_n * rep.fock_dim;
  const double sh = std::sqrt(hbar);
  const Mat ig = Mat::Identity(rep.grid_n, rep.grid_n), iff = Mat::Identity(rep.fock_dim, rep.fock_dim);
  o.Sp = sh * kron(g.position, iff);
  o.Sm = sh * kron(g.momentum, iff);
  o.Ad = sh * kron(ig, f.a_dagger);
  o.Am = sh * kron(ig, f.a);
  o.SpSm = 0.5 * (o.Sp * o.Sm + o.Sm * o.Sp);
  o.xgrid.resize(o.size);
  o.level.resize(o.size);
  for (int i = 0; i < rep.grid_n; ++i)
    for (int n = 0; n < rep.fock_dim; ++n) {
      o.xgrid(i * rep.fock_dim + n) = g.points(i);
      o.level(i * rep.fock_dim + n) = n;
    }
  return o;
}

// diagonal of (1 + S_+)^2 - c H / r^2 - d, with H = hbar (N + 1/2)
Vec joint_diag(const AmbientOps& o, double r, const std::function<double(double, double)>& f) {
  Vec out(o.size);
  for (int k = 0; k < o.size; ++k) out(k) = f(std::sqrt(o.hbar) * o.xgrid(k), o.hbar * (o.level(k) + 0.5));
  (void)r;
  return out;
}

}  // namespace

QuantumConnection s3_ambient_connection(double hbar, const AmbientS3Rep& rep) {
  const AmbientOps o = ambient_ops(hbar, rep);
  const auto l = r5_lambda_forms();
  const ChartField Y = r5_log_r_form();
  QuantumConnection q;
  q.name = "s3-ambient";
  q.chart = r5_chart();
  q.rep = HilbertRep{RepKind::Grid, o.size, hbar, -rep.half_width, rep.half_width};
  q.hbar = hbar;
  const cplx ih = I * hbar;
  auto parts = [o, hbar](double r) {
    const Vec mI = joint_diag(o, r, [r](double s, double H) { return (1.0 + s) * (1.0 + s) - H / (r * r); });
    Vec root = joint_diag(o, r, [r, hbar](double s, double H) {
      return (1.0 + s) * (1.0 + s) - (H + 0.5 * hbar) / (2.0 * r * r);
    });
    for (Eigen::Index k = 0; k < root.size(); ++k) {
      double v = root(k).real();
      if (v < 0.0) {
        if (v < -1e-12) throw SpectralDomainError(static_cast<int>(k), v);
        v = 0.0;
      }
      root(k) = std::sqrt(v);
    }
    return std::make_pair(mI, root);
  };
  q.coeff = [=](const RVec& x, int k) -> Mat {
    const double r = radius(x);
    const auto [mI, root] = parts(r);
    const cplx Lam = (l[2].eval(x)(k) + I * l[1].eval(x)(k)) / std::sqrt(2.0);
    const double lI = l[0].eval(x)(k), y = Y.eval(x)(k);
    Mat out = Mat::Zero(o.size, o.size);
    if (k == 4) out.diagonal().setConstant(1.0 / ih);
    out.diagonal() += lI / ih * mI;
    out += Lam / (ih * r) * (o.Ad * root.asDiagonal());
    out += std::conj(Lam) / (ih * r) * (root.asDiagonal() * o.Am);
    out += y / ih * (o.Sm + o.SpSm);
    return out;
  };
  q.grade0 = [=](const RVec& x, int k) -> Mat {
    const double r = radius(x);
    const cplx Lam = (l[2].eval(x)(k) + I * l[1].eval(x)(k)) / std::sqrt(2.0);
    const double lI = l[0].eval(x)(k), y = Y.eval(x)(k);
    Mat out = y / ih * o.SpSm;
    Vec quad(o.size);
    for (int j = 0; j < o.size; ++j) {
      const double s = std::sqrt(hbar) * o.xgrid(j);
      quad(j) = s * s - hbar * (o.level(j) + 0.5) / (r * r);
    }
    out.diagonal() += lI / ih * quad;
    out += Lam / (ih * r) * (o.Ad * o.Sp) + std::conj(Lam) / (ih * r) * (o.Sp * o.Am);
    return out;
  };
  return q;
}

std::vector<Vec> s3_ambient_probes(const AmbientS3Rep& rep, int levels, double width) {
  const RVec x = RVec::LinSpaced(rep.grid_n, -rep.half_width, rep.half_width);
  Vec g(rep.grid_n);
  for (int i = 0; i < rep.grid_n; ++i) g(i) = std::exp(-0.5 * x(i) * x(i) / (width * width));
  std::vector<Vec> out;
  for (int n = 0; n < std::min(levels, rep.fock_dim); ++n) {
    Vec p = Vec::Zero(rep.grid_n * rep.fock_dim);
    for (int i = 0; i < rep.grid_n; ++i) p(i * rep.fock_dim + n) = g(i);
    out.push_back(p / p.norm());
  }
  return out;
}

Mat s3_ambient_reduced_coeff(double hbar, int fock_dim, const RVec& x, const RVec& v, double s,
                             double* y_coefficient) {
  const FockOps f = fock_rep(fock_dim, hbar);
  const auto l = r5_lambda_forms();
  const double r = radius(x);
  const Mat id = Mat::Identity(fock_dim, fock_dim);
  const Mat H = f.number_op + 0.5 * hbar * id;
  const Mat mI = (1.0 + s) * (1.0 + s) * id - H / (r * r);
  const Mat root = spectral_sqrt((1.0 + s) * (1.0 + s) * id - (H + 0.5 * hbar * id) / (2.0 * r * r));
  const cplx ih = I * hbar;
  const double lI = l[0].eval(x).dot(v);
  const cplx Lam = (l[2].eval(x).dot(v) + I * l[1].eval(x).dot(v)) / std::sqrt(2.0);
  if (y_coefficient) *y_coefficient = r5_log_r_form().eval(x).dot(v);
  return v(4) / ih * id + lI / ih * mI + Lam / (ih * r) * (f.a_dagger * root) +
         std::conj(Lam) / (ih * r) * (root * f.a);
}

ReductionReport s3_reduce_to_strict(double hbar, const std::vector<RVec>& pts) {
  const int dim = static_cast<int>(std::lround(2.0 / hbar));
  if (std::abs(dim * hbar - 2.0) > 1e-9) throw InvalidArgument("s3_reduce_to_strict: 2/hbar must be an integer");
  const ModelInstance strict = s3_strict_model(hbar, dim);
  ReductionReport rep;
  for (const RVec& a : pts) {
    RVec x = RVec::Zero(5);
    x.head(4) = s3_embed(a);
    const RMat jac = s3_embed_jacobian(a);
    for (int mu = 0; mu < 3; ++mu) {
      RVec v = RVec::Zero(5);
      v.head(4) = jac.col(mu);
      double y = 0.0;
      const Mat red = s3_ambient_reduced_coeff(hbar, dim, x, v, 0.0, &y);
      rep.max_difference = std::max(rep.max_difference, (red - strict.conn.coeff(a, mu)).norm());
      rep.y_pullback = std::max(rep.y_pullback, std::abs(y));
      rep.eps_diff_1 = std::max(rep.eps_diff_1, (s3_ambient_reduced_coeff(hbar, dim, x, v, 1e-3) - red).norm());
      rep.eps_diff_2 = std::max(rep.eps_diff_2, (s3_ambient_reduced_coeff(hbar, dim, x, v, 1e-4) - red).norm());
    }
  }
  return rep;
}

// ---- contactization ----

ContactizationModel contactization_model(ContactBase base, double hbar, int fock_dim) {
  ContactizationModel m;
  m.base = base;
  m.base_model = base == ContactBase::Darboux ? darboux_model(1, hbar, fock_dim) : r3_model(hbar, fock_dim);
  const ModelInstance b = m.base_model;
  AmbientFrameData& d = m.frames;
  d.chart.dim = 5;
  d.chart.names = {"mu", "tau"};
  for (const auto& n : b.chart.names) d.chart.names.push_back(n);
  d.chart.domain = [bc = b.chart](const RVec& x) { return bc.domain(RVec(x.tail(3))); };
  d.A.rank = Rank::OneForm;
  d.A.dim = 5;
  d.A.eval = [alpha = b.alpha](const RVec& x) {
    RVec a = RVec::Zero(5);
    a(1) = 1.0;
    a.tail(3) = std::exp(2.0 * x(0)) * alpha.eval(RVec(x.tail(3)));
    return a;
  };
  d.A.jacobian = [alpha = b.alpha, bc = b.chart](const RVec& x) {
    const RVec z = x.tail(3);
    const double e2 = std::exp(2.0 * x(0));
    RMat j = RMat::Zero(5, 5);
    j.block(2, 0, 3, 1) = 2.0 * e2 * alpha.eval(z);
    j.block(2, 2, 3, 3) = e2 * field_jacobian(alpha, bc, z, DerivMethod::Analytic);
    return j;
  };
  d.X = make_field(Rank::Vector, 5, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a = VecT<T>::Zero(5);
    a(0) = T(1.0);
    a(1) = T(2.0) * v(1);
    return a;
  });
  const RMat j = b.coframe.j;
  d.J = RMat::Zero(4, 4);
  d.J(0, 3) = -1.0;
  d.J(3, 0) = 1.0;
  d.J.block(1, 1, 2, 2) = j;
  const Coframe cf = b.coframe;
  d.E = [alpha = b.alpha, cf](const RVec& x) {
    const RVec z = x.tail(3);
    RMat E = RMat::Zero(4, 5);
    E.block(0, 2, 1, 3) = 2.0 * std::exp(2.0 * x(0)) * alpha.eval(z).transpose();
    for (int a = 0; a < 2; ++a) E.block(1 + a, 2, 1, 3) = std::exp(x(0)) * cf.e[a].eval(z).transpose();
    E(3, 0) = 1.0;
    return E;
  };
  m.P = [](const RVec&) { return RMat(RMat::Zero(2, 3)); };
  m.Q = [](const RVec&) { return RVec(RVec::Zero(3)); };
  d.Omega = [alpha = b.alpha, cf, bc = b.chart, j](const RVec& x) {
    const RVec z = x.tail(3);
    const double mu = x(0);
    const ConnectionForm w = levi_connection_solve(cf, alpha, bc, z);
    RMat e(2, 3);
    for (int a = 0; a < 2; ++a) e.row(a) = cf.e[a].eval(z).transpose();
    const RMat elow = j * e;  // e_b = j_bc e^c
    const RVec al = alpha.eval(z);
    std::vector<RMat> W(5, RMat::Zero(4, 4));
    W[0](0, 0) = -1.0;
    W[0](3, 3) = 1.0;
    for (int k = 0; k < 3; ++k) {
      RMat& o = W[2 + k];
      for (int b2 = 0; b2 < 2; ++b2) o(0, 1 + b2) = std::exp(mu) * elow(b2, k);
      o(0, 3) = 2.0 * std::exp(2.0 * mu) * al(k);
      o.block(1, 1, 2, 2) = w[k];
      for (int a = 0; a < 2; ++a) o(1 + a, 3) = std::exp(mu) * e(a, k);
    }
    return W;
  };

  const FockOps f = fock_rep(fock_dim, 1.0);
  const Mat id = Mat::Identity(fock_dim, fock_dim);
  m.S = {kron(f.s2, id), kron(id, f.s1), kron(id, f.s2), kron(f.s1, id)};
  const std::vector<int> interior = fock_interior(fock_dim, 2, 2);
  const AmbientFrameData frames = d;
  const std::vector<Mat> S = m.S;
  m.family = [frames, S, interior](double hb) {
    QuantumConnection q;
    q.name = "contactization";
    q.chart = frames.chart;
    q.rep = HilbertRep{RepKind::Fock, static_cast<int>(S[0].rows()), hb, 0.0, 0.0};
    q.hbar = hb;
    q.interior = interior;
    const auto n = S[0].rows();
    const cplx g2 = 1.0 / (I * hb), g1 = 1.0 / (I * std::sqrt(hb));
    auto minus1 = [frames, S, g1, n](const RVec& x, int k) {
      const RMat E = frames.E(x);
      Mat out = Mat::Zero(n, n);
      for (int A = 0; A < 4; ++A)
        if (E(A, k) != 0.0) out += g1 * E(A, k) * S[A];
      return out;
    };
    auto zero = [frames, S](const RVec& x, int k) { return quadratic_term(frames.Omega(x)[k], frames.J, S); };
    q.coeff = [=](const RVec& x, int k) -> Mat {
      Mat out = minus1(x, k) + zero(x, k);
      out.diagonal().array() += g2 * frames.A.eval(x)(k);
      return out;
    };
    q.grade0 = zero;
    q.grade_m1 = minus1;
    return q;
  };
  return m;
}

double ambient_d_operator_residual(const ContactizationModel& m, const ChartField& F, double w,
                                   const std::vector<RVec>& points) {
  const AmbientFrameData& d = m.frames;
  const ModelInstance& b = m.base_model;
  double worst = 0.0;
  auto f = [&](const RVec& x) { return std::exp(w * x(0)) * F.eval(RVec(x.tail(3)))(0); };
  for (const RVec& x : points) {
    RVec df(5);
    for (int k = 0; k < 5; ++k) df(k) = stencil([&](const RVec& y) -> RVec { return RVec::Constant(1, f(y)); }, x, k, d.h)(0);
    const RVec R = reeb_vector(d.A, d.chart, x);
    const RVec xflat = interior(d.X.eval(x), d_one_form(d.A, d.chart, x));
    const RVec Df = df - (d.A.eval(x) - 0.5 * xflat) * R.dot(df);
    const RMat E = d.E(x);
    const RVec c = E.transpose().colPivHouseholderQr().solve(Df);
    const double mu = x(0);
    const RVec z = x.tail(3);
    const CoContractor intrinsic = d_operator(F, w, b.alpha, b.chart, z, DerivMethod::FiniteDifference);
    const RMat frame = distribution_frame(b.coframe, b.alpha, z);
    const RVec mid = frame.transpose() * intrinsic.mid;
    const double scale = std::exp(-w * mu);
    worst = std::max(worst, std::abs(c(3) * scale - intrinsic.bottom));
    for (int a = 0; a < 2; ++a) worst = std::max(worst, std::abs(c(1 + a) * scale * std::exp(mu) - mid(a)));
    worst = std::max(worst, std::abs(c(0) * scale * std::exp(2.0 * mu) - intrinsic.top));
    worst = std::max(worst, (E.transpose() * c - Df).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace cq
