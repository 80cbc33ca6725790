#include "cq/geometry.hpp"

#include <cmath>
#include <random>

#include "cq/errors.hpp"

namespace cq {

const char* method_tag(DerivMethod m) { return m == DerivMethod::Analytic ? "analytic" : "finite-difference"; }

void Chart::require(const RVec& x) const {
  if (x.size() != dim) throw InvalidArgument("chart point has wrong dimension");
  if (!domain(x)) throw OutsideDomain("point outside chart domain");
}

ChartField constant_field(Rank rank, const RVec& coeffs) {
  ChartField f;
  f.rank = rank;
  f.dim = rank == Rank::TwoForm ? static_cast<int>(std::lround(std::sqrt(coeffs.size()))) : static_cast<int>(coeffs.size());
  f.eval = [coeffs](const RVec&) { return coeffs; };
  f.jacobian = [coeffs](const RVec& x) { return RMat::Zero(coeffs.size(), x.size()).eval(); };
  return f;
}

ChartField strip_jacobian(ChartField f) {
  f.jacobian = nullptr;
  return f;
}

RMat field_jacobian(const ChartField& f, const Chart& c, const RVec& x, DerivMethod m) {
  if (m == DerivMethod::Analytic && f.has_jacobian()) return f.jacobian(x);
  const RVec y0 = f.eval(x);
  RMat jac(y0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    RVec xp = x, xm = x;
    xp(i) += c.h;
    xm(i) -= c.h;
    if (!c.domain(xp) || !c.domain(xm)) throw OutsideDomain("finite-difference stencil leaves chart domain");
    jac.col(i) = (f.eval(xp) - f.eval(xm)) / (2.0 * c.h);
  }
  return jac;
}

RMat as_two_form(const RVec& coeffs, int dim) { return Eigen::Map<const RMat>(coeffs.data(), dim, dim); }

RMat d_one_form(const ChartField& f, const Chart& c, const RVec& x, DerivMethod m) {
  c.require(x);
  const RMat j = field_jacobian(f, c, x, m);  // j(i, k) = d_k a_i
  return j.transpose() - j;                    // F(k, i) = d_k a_i - d_i a_k
}

RVec exterior_derivative(const ChartField& f, const Chart& c, const RVec& x, DerivMethod m) {
  c.require(x);
  if (f.rank == Rank::Scalar) return field_jacobian(f, c, x, m).row(0).transpose();
  if (f.rank == Rank::OneForm) return d_one_form(f, c, x, m).reshaped();
  throw InvalidArgument("exterior_derivative: rank must be scalar or 1-form");
}

ChartField d_field(const ChartField& one_form, const Chart& c, DerivMethod m) {
  ChartField out;
  out.rank = Rank::TwoForm;
  out.dim = one_form.dim;
  out.eval = [one_form, c, m](const RVec& x) -> RVec { return d_one_form(one_form, c, x, m).reshaped(); };
  return out;
}

double dd_residual(const ChartField& one_form, const Chart& c, const RVec& x) {
  const ChartField F = d_field(one_form, c, DerivMethod::Analytic);
  const int n = c.dim;
  std::vector<RMat> dF(n);
  for (int k = 0; k < n; ++k) {
    RVec xp = x, xm = x;
    xp(k) += c.h;
    xm(k) -= c.h;
    dF[k] = as_two_form((F.eval(xp) - F.eval(xm)) / (2.0 * c.h), n);
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(dF[i](j, k) + dF[j](k, i) + dF[k](i, j)));
  return worst;
}

RMat wedge(const RVec& a, const RVec& b) { return a * b.transpose() - b * a.transpose(); }

double interior(const RVec& v, const RVec& a) { return v.dot(a); }

RVec interior(const RVec& v, const RMat& F) { return F.transpose() * v; }

RVec lie_derivative(const ChartField& v, const ChartField& a, const Chart& c, const RVec& x, DerivMethod m) {
  c.require(x);
  const RVec vx = v.eval(x), ax = a.eval(x);
  const RMat F = d_one_form(a, c, x, m);
  const RMat ja = field_jacobian(a, c, x, m), jv = field_jacobian(v, c, x, m);
  return interior(vx, F) + ja.transpose() * vx + jv.transpose() * ax;
}

RVec lie_bracket(const ChartField& v, const ChartField& u, const Chart& c, const RVec& x, DerivMethod m) {
  c.require(x);
  return field_jacobian(u, c, x, m) * v.eval(x) - field_jacobian(v, c, x, m) * u.eval(x);
}

RVec reeb_vector(const ChartField& alpha, const Chart& c, const RVec& x, DerivMethod m, SolveInfo* info) {
  const RMat F = d_one_form(alpha, c, x, m);
  const int n = c.dim;
  RMat sys(n + 1, n);
  sys.topRows(n) = F.transpose();
  sys.row(n) = alpha.eval(x).transpose();
  RVec rhs = RVec::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::ColPivHouseholderQR<RMat> qr(sys);
  qr.setThreshold(1e-12);
  if (qr.rank() < n) throw DegenerateContactForm("reeb_vector: d(alpha) is degenerate on ker(alpha)");
  if (info) {
    Eigen::JacobiSVD<RMat> svd(sys);
    const RVec s = svd.singularValues();
    info->condition = s(0) / s(s.size() - 1);
  }
  return qr.solve(rhs);
}

RVec flat(const RVec& v, const ChartField& alpha, const Chart& c, const RVec& x, DerivMethod m) {
  const RVec a = alpha.eval(x);
  if (std::abs(a.dot(v)) > 1e-8 * std::max(1.0, v.norm()))
    throw NotInDistribution("flat: vector is not in the distribution");
  return d_one_form(alpha, c, x, m).transpose() * v;
}

RVec sharp(const RVec& omega, const ChartField& alpha, const Chart& c, const RVec& x, DerivMethod m) {
  const RVec rho = reeb_vector(alpha, c, x, m);
  if (std::abs(omega.dot(rho)) > 1e-8 * std::max(1.0, omega.norm()))
    throw NotInDistribution("sharp: covector does not annihilate the Reeb field");
  const int n = c.dim;
  RMat sys(n + 1, n);
  sys.topRows(n) = d_one_form(alpha, c, x, m).transpose();
  sys.row(n) = alpha.eval(x).transpose();
  RVec rhs(n + 1);
  rhs << omega, 0.0;
  return sys.colPivHouseholderQr().solve(rhs);
}

RMat coframe_matrix(const Coframe& f, const RVec& x) {
  RMat e(f.rank(), x.size());
  for (int a = 0; a < f.rank(); ++a) e.row(a) = f.e[a].eval(x).transpose();
  return e;
}

namespace {
RMat full_basis(const Coframe& f, const ChartField& alpha, const RVec& x) {
  RMat b(f.rank() + 1, x.size());
  b.row(0) = alpha.eval(x).transpose();
  b.bottomRows(f.rank()) = coframe_matrix(f, x);
  return b;
}
}  // namespace

RMat distribution_frame(const Coframe& f, const ChartField& alpha, const RVec& x) {
  const RMat b = full_basis(f, alpha, x);
  if (b.rows() != b.cols()) throw InvalidArgument("distribution_frame: coframe does not complete alpha to a basis");
  return b.inverse().rightCols(f.rank());
}

double structure_residual(const Coframe& f, const ChartField& alpha, const Chart& c,
                          const std::vector<RVec>& points, DerivMethod m) {
  double worst = 0.0;
  for (const RVec& x : points) {
    RMat r = d_one_form(alpha, c, x, m);
    const RMat e = coframe_matrix(f, x);
    for (int a = 0; a < f.rank(); ++a)
      for (int b = 0; b < f.rank(); ++b)
        if (f.j(a, b) != 0.0) r -= 0.5 * f.j(a, b) * wedge(e.row(a).transpose(), e.row(b).transpose());
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double torsion_residual(const Coframe& f, const ConnectionForm& w, const Chart& c, const RVec& x, DerivMethod m) {
  const RMat e = coframe_matrix(f, x);
  const int n = c.dim;
  double worst = 0.0;
  for (int a = 0; a < f.rank(); ++a) {
    RMat r = d_one_form(f.e[a], c, x, m);
    for (int b = 0; b < f.rank(); ++b) {
      RVec wab(n);
      for (int k = 0; k < n; ++k) wab(k) = w[k](a, b);
      r += wedge(wab, e.row(b).transpose());
    }
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

// Symmetric-matrix parametrisation of the lowered connection coefficients
// S_mu = j W_mu, one block per basis 1-form theta^mu = (alpha, e^c).
struct LeviSystem {
  int r = 0, n = 0;
  std::vector<std::pair<int, int>> sym_index;

  int unknowns() const { return n * static_cast<int>(sym_index.size()); }

  std::vector<RMat> to_s(const RVec& p) const {
    std::vector<RMat> s(n, RMat::Zero(r, r));
    const int m = static_cast<int>(sym_index.size());
    for (int mu = 0; mu < n; ++mu)
      for (int k = 0; k < m; ++k) {
        const auto [i, j] = sym_index[k];
        s[mu](i, j) = p(mu * m + k);
        s[mu](j, i) = p(mu * m + k);
      }
    return s;
  }
};

double sym3(const std::vector<RMat>& s, int a, int b, int c) {
  // s[c + 1](a, b) holds S_{ab c} for the e^c components
  return (s[c + 1](a, b) + s[c + 1](b, a) + s[a + 1](b, c) + s[a + 1](c, b) + s[b + 1](a, c) + s[b + 1](c, a)) / 6.0;
}

void remove_totally_symmetric(std::vector<RMat>& s, int r) {
  std::vector<RMat> out = s;
  for (int c = 0; c < r; ++c)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) out[c + 1](a, b) = s[c + 1](a, b) - sym3(s, a, b, c);
  s = out;
}

}  // namespace

ConnectionForm levi_connection_solve(const Coframe& f, const ChartField& alpha, const Chart& c, const RVec& x,
                                     DerivMethod m) {
  c.require(x);
  const int r = f.rank(), n = c.dim;
  if (r + 1 != n) throw InvalidArgument("levi_connection_solve: coframe must have dim - 1 forms");
  const RMat B = full_basis(f, alpha, x);
  const RMat Binv = B.inverse();
  const RMat jinv = f.j.inverse();

  LeviSystem sys{r, n, {}};
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) sys.sym_index.emplace_back(i, j);

  // Target: antisymmetric frame components of -d e^a.
  std::vector<RMat> target(r);
  for (int a = 0; a < r; ++a) target[a] = -Binv.transpose() * d_one_form(f.e[a], c, x, m) * Binv;

  auto apply = [&](const RVec& p) {
    const std::vector<RMat> s = sys.to_s(p);
    RVec out(r * n * n);
    for (int a = 0; a < r; ++a) {
      RMat g = RMat::Zero(n, n);
      for (int mu = 0; mu < n; ++mu) {
        const RMat w = jinv * s[mu];
        for (int b = 0; b < r; ++b) g(mu, b + 1) = w(a, b);
      }
      out.segment(a * n * n, n * n) = (g - g.transpose()).reshaped();
    }
    return out;
  };

  const int nu = sys.unknowns();
  RMat A(r * n * n, nu);
  for (int k = 0; k < nu; ++k) A.col(k) = apply(RVec::Unit(nu, k));
  RVec rhs(r * n * n);
  for (int a = 0; a < r; ++a) rhs.segment(a * n * n, n * n) = target[a].reshaped();
  const RVec p = A.completeOrthogonalDecomposition().solve(rhs);
  std::vector<RMat> s = sys.to_s(p);
  remove_totally_symmetric(s, r);

  ConnectionForm w(n, RMat::Zero(r, r));
  for (int mu = 0; mu < n; ++mu) {
    const RMat wm = jinv * s[mu];
    for (int k = 0; k < n; ++k) w[k] += wm * B(mu, k);
  }
  const double res = torsion_residual(f, w, c, x, m);
  if (res > 1e-8) throw InconsistentFrame("levi_connection_solve: first-order solve does not close", res);
  return w;
}

double levi_difference_mod_kernel(const Coframe& f, const ChartField& alpha, const RVec& x, const ConnectionForm& w1,
                                  const ConnectionForm& w2) {
  const int r = f.rank(), n = static_cast<int>(x.size());
  const RMat Binv = full_basis(f, alpha, x).inverse();
  std::vector<RMat> s(n, RMat::Zero(r, r));
  for (int mu = 0; mu < n; ++mu) {
    RMat wm = RMat::Zero(r, r);
    for (int k = 0; k < n; ++k) wm += (w1[k] - w2[k]) * Binv(k, mu);
    s[mu] = f.j * wm;
  }
  remove_totally_symmetric(s, r);
  double tot = 0.0;
  for (const RMat& m : s) tot += m.squaredNorm();
  return std::sqrt(tot);
}

RescaleDecomposition rescale_decompose(const ChartField& omega, const ChartField& alpha, const Chart& c,
                                       const RVec& x, DerivMethod m) {
  const double w = omega.eval(x)(0);
  if (!(w > 0.0)) throw InvalidArgument("rescale_decompose: Omega must be positive");
  const RVec dlog = exterior_derivative(omega, c, x, m) / w;
  const RVec rho = reeb_vector(alpha, c, x, m);
  RescaleDecomposition out;
  out.chi = rho.dot(dlog);
  out.upsilon = dlog - out.chi * alpha.eval(x);
  return out;
}

std::vector<RVec> sample_points(const Chart& c, const RVec& lo, const RVec& hi, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RVec> pts;
  int guard = 0;
  while (static_cast<int>(pts.size()) < n) {
    if (++guard > 100 * n + 1000) throw InvalidArgument("sample_points: domain too small for the box");
    RVec x(c.dim);
    for (int i = 0; i < c.dim; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * u(rng);
    if (c.domain(x)) pts.push_back(x);
  }
  return pts;
}

}  // namespace cq
