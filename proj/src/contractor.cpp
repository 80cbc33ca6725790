#include "cq/contractor.hpp"

#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <unsupported/Eigen/FFT>

#include "cq/errors.hpp"

namespace cq {

RescaleData make_rescale_data(double Omega, const RVec& upsilon, double chi, const RMat& M, const RMat& j) {
  RescaleData d;
  d.Omega = Omega;
  d.upsilon = upsilon;
  d.upsilon_sharp = j.transpose().fullPivLu().solve(upsilon);
  d.chi = chi;
  d.M = M;
  d.j = j;
  return d;
}

RescaleData identity_rescale(const RMat& j) {
  const auto n = j.rows();
  return make_rescale_data(1.0, RVec::Zero(n), 0.0, RMat::Identity(n, n), j);
}

bool is_symplectic(const RMat& M, const RMat& j, double tol) {
  return (M.transpose() * j * M - j).cwiseAbs().maxCoeff() <= tol;
}

namespace {

// (v+, v - v+ Y#, v- + Y(v) - v+ chi / 2)
Contractor shear(const Contractor& c, const RVec& ups, const RVec& ups_sharp, double chi) {
  Contractor out = c;
  out.mid = c.mid - c.plus * ups_sharp;
  out.minus = c.minus + ups.dot(c.mid) - 0.5 * c.plus * chi;
  return out;
}

Contractor dilate(const Contractor& c, const RescaleData& d) {
  Contractor out = c;
  const double s = std::pow(d.Omega, c.weight);
  out.plus = s * d.Omega * c.plus;
  out.mid = s * (d.M * c.mid);
  out.minus = s * c.minus / d.Omega;
  out.scale = d.target_scale;
  return out;
}

void check(const RescaleData& d) {
  if (!is_symplectic(d.M, d.j)) throw NotSymplectic("rescale: M is not symplectic");
  if (!(d.Omega > 0.0)) throw InvalidArgument("rescale: Omega must be positive");
}

}  // namespace

Contractor rescale_contractor(const Contractor& c, const RescaleData& d) {
  check(d);
  return dilate(shear(c, d.upsilon, d.upsilon_sharp, d.chi), d);
}

Contractor rescale_contractor_unchecked(const Contractor& c, const RescaleData& d) {
  return dilate(shear(c, d.upsilon, d.upsilon_sharp, d.chi), d);
}

Contractor rescale_successive(const Contractor& c, const RescaleData& first, const RescaleData& second) {
  check(first);
  check(second);
  const RVec ups = first.Omega * (first.M.transpose() * second.upsilon);
  const RVec ups_sharp = first.j.transpose().fullPivLu().solve(ups);
  const double chi = first.Omega * first.Omega * second.chi;
  const Contractor pulled = shear(c, ups, ups_sharp, chi);
  return dilate(rescale_contractor(pulled, first), second);
}

Contractor rescale_naive_compose(const Contractor& c, const RescaleData& first, const RescaleData& second) {
  return rescale_contractor(rescale_contractor(c, first), second);
}

Density pairing_J(const Contractor& u, const Contractor& v, const RMat& j) {
  if (u.scale != v.scale) throw InvalidArgument("pairing_J: contractors expressed in different scales");
  return {u.plus * v.minus - u.minus * v.plus + u.mid.dot(j * v.mid), u.weight + v.weight};
}

RescaleData rescale_data_at(const ChartField& Omega, const ChartField& alpha, const Coframe& f, const Chart& c,
                            const RVec& x, const RMat& M, DerivMethod m) {
  const RescaleDecomposition rd = rescale_decompose(Omega, alpha, c, x, m);
  const RMat frame = distribution_frame(f, alpha, x);
  return make_rescale_data(Omega.eval(x)(0), frame.transpose() * rd.upsilon, rd.chi, M, f.j);
}

CoContractor d_operator(const ChartField& nu, double w, const ChartField& alpha, const Chart& c, const RVec& x,
                        DerivMethod m) {
  const RVec dnu = exterior_derivative(nu, c, x, m);
  const double rho_nu = reeb_vector(alpha, c, x, m).dot(dnu);
  CoContractor out;
  out.top = 0.5 * rho_nu;
  out.mid = dnu - rho_nu * alpha.eval(x);
  out.bottom = w * nu.eval(x)(0);
  out.weight = w - 1.0;
  return out;
}

Contractor raise(const CoContractor& d, const ChartField& alpha, const Coframe& f, const Chart& c, const RVec& x,
                 DerivMethod m) {
  Contractor out;
  out.plus = -d.bottom;
  out.mid = coframe_matrix(f, x) * sharp(d.mid, alpha, c, x, m);
  out.minus = d.top;
  out.weight = d.weight;
  return out;
}

Contractor connection_apply(const ContractorConnectionData& cd, const RVec& z, const ContractorField& V,
                            const RVec& x) {
  if (!V.plus.eval || !V.mid.eval || !V.minus.eval) throw InvalidArgument("connection_apply: missing field data");
  const Chart& c = cd.chart;
  const DerivMethod fd = DerivMethod::FiniteDifference;
  const RMat e = coframe_matrix(cd.coframe, x);
  const RVec rho = reeb_vector(cd.alpha, c, x);
  const double az = cd.alpha.eval(x).dot(z);
  const RVec zbar = e * z - az * (e * rho);
  const ConnectionForm w = cd.omega(x);
  RMat wz = RMat::Zero(e.rows(), e.rows());
  for (int k = 0; k < c.dim; ++k) wz += w[k] * z(k);
  const RVec Pz = cd.P(x) * z;
  const double Qz = cd.Q(x).dot(z);
  const RMat& j = cd.coframe.j;

  const double vp = V.plus.eval(x)(0), vm = V.minus.eval(x)(0);
  const RVec v = V.mid.eval(x);
  const double zvp = field_jacobian(V.plus, c, x, fd).row(0).dot(z);
  const double zvm = field_jacobian(V.minus, c, x, fd).row(0).dot(z);
  const RVec zv = field_jacobian(V.mid, c, x, fd) * z;

  Contractor out;
  out.plus = zvp + v.dot(j * zbar) + 2.0 * vm * az;
  out.mid = zv + wz * v - vp * Pz + vm * zbar;
  out.minus = zvm + 0.5 * Qz * vp + v.dot(j * Pz);
  return out;
}

ContractorField scale_tractor(const ChartField& sigma, const ContractorConnectionData& cd) {
  auto lowered = [sigma, cd](const RVec& x) {
    return d_operator(strip_jacobian(sigma), 1.0, cd.alpha, cd.chart, x, DerivMethod::FiniteDifference);
  };
  ContractorField I;
  I.plus.rank = I.minus.rank = Rank::Scalar;
  I.mid.rank = Rank::Vector;
  I.plus.dim = I.minus.dim = I.mid.dim = cd.chart.dim;
  I.plus.eval = [lowered](const RVec& x) { return RVec::Constant(1, -lowered(x).bottom); };
  I.minus.eval = [lowered](const RVec& x) { return RVec::Constant(1, lowered(x).top); };
  I.mid.eval = [lowered, cd](const RVec& x) -> RVec {
    return raise(lowered(x), cd.alpha, cd.coframe, cd.chart, x).mid;
  };
  return I;
}

double parallel_scale_check(const ContractorConnectionData& cd, const ChartField& sigma,
                            const std::vector<RVec>& points) {
  const ContractorField I = scale_tractor(sigma, cd);
  double worst = 0.0;
  for (const RVec& x : points) {
    if (!(sigma.eval(x)(0) > 0.0)) throw InvalidArgument("parallel_scale_check: sigma must be positive");
    for (int i = 0; i < cd.chart.dim; ++i) {
      const Contractor r = connection_apply(cd, RVec::Unit(cd.chart.dim, i), I, x);
      const double n = std::sqrt(r.plus * r.plus + r.mid.squaredNorm() + r.minus * r.minus);
      worst = std::max(worst, n);
    }
  }
  return worst;
}

ParabolicData parabolic_from(const RescaleData& d) {
  if (d.upsilon_sharp.size() != 2) throw InvalidArgument("parabolic_from: single distribution pair only");
  return {d.Omega, d.upsilon_sharp(0), d.upsilon_sharp(1), d.chi};
}

ParabolicData compose_parabolic(const ParabolicData& d1, const ParabolicData& d2) {
  ParabolicData out;
  out.Omega = d1.Omega * d2.Omega;
  out.a = d1.a / d2.Omega + d2.a;
  out.b = d1.b / d2.Omega + d2.b;
  out.chi = d1.chi / (d2.Omega * d2.Omega) + d2.chi + 2.0 * (d1.a * d2.b - d1.b * d2.a) / d2.Omega;
  return out;
}

ParabolicWavefunction make_parabolic_grid(int ny, double ly, int nx, double lx,
                                          const std::function<cplx(double, double)>& f) {
  ParabolicWavefunction w;
  w.y = RVec::LinSpaced(ny, -ly, ly);
  w.x = RVec::LinSpaced(nx, -lx, lx);
  w.samples.resize(ny, nx);
  for (int i = 0; i < ny; ++i)
    for (int k = 0; k < nx; ++k) w.samples(i, k) = f(w.y(i), w.x(k));
  return w;
}

namespace {

double spacing(const RVec& g) { return (g(g.size() - 1) - g(0)) / (g.size() - 1); }

// Psi(Omega y, x) * sqrt(Omega)
Mat dilate_y(const ParabolicWavefunction& p, double Omega) {
  const int ny = static_cast<int>(p.y.size()), nx = static_cast<int>(p.x.size());
  const double dy = spacing(p.y), y0 = p.y(0), y1 = p.y(ny - 1);
  Mat out(ny, nx);
  std::vector<double> re(ny), im(ny);
  for (int k = 0; k < nx; ++k) {
    for (int i = 0; i < ny; ++i) {
      re[i] = p.samples(i, k).real();
      im[i] = p.samples(i, k).imag();
    }
    boost::math::interpolators::cardinal_cubic_b_spline<double> sr(re.data(), re.size(), y0, dy);
    boost::math::interpolators::cardinal_cubic_b_spline<double> si(im.data(), im.size(), y0, dy);
    for (int i = 0; i < ny; ++i) {
      const double yy = Omega * p.y(i);
      out(i, k) = (yy < y0 || yy > y1) ? cplx(0.0) : cplx(sr(yy), si(yy)) * std::sqrt(Omega);
    }
  }
  return out;
}

// row i translated by shift(i): G(y_i, x + shift_i), spectrally
Mat translate_x(const Mat& g, const RVec& x, const RVec& shift) {
  const int ny = static_cast<int>(g.rows()), nx = static_cast<int>(g.cols());
  const double dx = spacing(x);
  Eigen::FFT<double> fft;
  Mat out(ny, nx);
  std::vector<cplx> row(nx), spec(nx), back(nx);
  for (int i = 0; i < ny; ++i) {
    for (int k = 0; k < nx; ++k) row[k] = g(i, k);
    fft.fwd(spec, row);
    for (int m = 0; m < nx; ++m) {
      const int mm = m <= nx / 2 ? m : m - nx;
      double kk = 2.0 * M_PI * mm / (nx * dx);
      if (nx % 2 == 0 && m == nx / 2) kk = 0.0;
      spec[m] *= std::exp(I * kk * shift(i));
    }
    fft.inv(back, spec);
    for (int k = 0; k < nx; ++k) out(i, k) = back[k];
  }
  return out;
}

}  // namespace

ParabolicWavefunction parabolic_lift(const ParabolicData& d, const ParabolicWavefunction& psi) {
  const double dy = spacing(psi.y), dx = spacing(psi.x);
  const double ymax = psi.y.cwiseAbs().maxCoeff(), xmax = psi.x.cwiseAbs().maxCoeff();
  const double W = d.Omega;
  // local wavenumbers of the chirp phase
  const double ky = std::abs(W * W * d.chi) * ymax / 2.0 + std::abs(W * d.b) * xmax + std::abs(W * W * d.a * d.b) * ymax;
  const double kx = std::abs(W * d.b) * ymax;
  if (ky >= M_PI / dy || kx >= M_PI / dx)
    throw ResolutionError("parabolic_lift: chirp phase exceeds the grid Nyquist bound");

  ParabolicWavefunction out = psi;
  const Mat dil = dilate_y(psi, W);
  const RVec shift = W * d.a * psi.y;
  const Mat sh = translate_x(dil, psi.x, shift);
  for (int i = 0; i < psi.y.size(); ++i)
    for (int k = 0; k < psi.x.size(); ++k) {
      const double y = psi.y(i), x = psi.x(k);
      const double phase = W * y * (d.chi * W * y / 4.0 + d.b * (x + W * y * d.a / 2.0));
      out.samples(i, k) = std::exp(-I * phase) * sh(i, k);
    }
  return out;
}

double l2_norm(const ParabolicWavefunction& psi) {
  return psi.samples.norm() * std::sqrt(spacing(psi.y) * spacing(psi.x));
}

double projective_distance(const Mat& ref, const Mat& other) {
  Eigen::Index r = 0, c = 0;
  ref.cwiseAbs().maxCoeff(&r, &c);
  const cplx a = ref(r, c), b = other(r, c);
  cplx phase = 1.0;
  if (std::abs(b) > 0.0) phase = (a / std::abs(a)) / (b / std::abs(b));
  return (ref - phase * other).norm() / ref.norm();
}

}  // namespace cq
