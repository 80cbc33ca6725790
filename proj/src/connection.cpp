#include "cq/connection.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "cq/errors.hpp"

namespace cq {

int QuantumConnection::size() const { return rep.dim; }

Mat QuantumConnection::along(const RVec& x, const RVec& v) const {
  Mat out;
  for (int i = 0; i < chart.dim; ++i) {
    if (v(i) == 0.0) continue;
    if (out.size() == 0)
      out = v(i) * coeff(x, i);
    else
      out += v(i) * coeff(x, i);
  }
  if (out.size() == 0) out = Mat::Zero(coeff(x, 0).rows(), coeff(x, 0).cols());
  return out;
}

QuantumConnection zero_connection(const Chart& c, int dim) {
  QuantumConnection q;
  q.name = "zero";
  q.chart = c;
  q.rep = HilbertRep{RepKind::Fock, dim, 1.0, 0.0, 0.0};
  q.coeff = [dim](const RVec&, int) { return Mat(Mat::Zero(dim, dim)); };
  q.dcoeff = [dim](const RVec&, int, int) { return Mat(Mat::Zero(dim, dim)); };
  return q;
}

double residual_norm(const QuantumConnection& conn, const Mat& m) {
  return conn.interior.empty() ? m.norm() : masked_norm(m, conn.interior);
}

namespace {

Mat coeff_derivative(const QuantumConnection& conn, const RVec& x, int i, int k, DerivMethod m) {
  if (m == DerivMethod::Analytic && conn.dcoeff) return conn.dcoeff(x, i, k);
  const double h = conn.chart.h;
  RVec xp = x, xm = x;
  xp(k) += h;
  xm(k) -= h;
  conn.chart.require(xp);
  conn.chart.require(xm);
  return (conn.coeff(xp, i) - conn.coeff(xm, i)) / (2.0 * h);
}

}  // namespace

Mat curvature(const QuantumConnection& conn, const RVec& x, int i, int j, DerivMethod m) {
  if (i == j) throw InvalidArgument("curvature: i == j");
  conn.chart.require(x);
  const Mat ai = conn.coeff(x, i), aj = conn.coeff(x, j);
  return coeff_derivative(conn, x, j, i, m) - coeff_derivative(conn, x, i, j, m) + commutator(ai, aj);
}

CurvatureReport flatness_residual(const QuantumConnection& conn, const std::vector<RVec>& points, DerivMethod m) {
  CurvatureReport rep;
  rep.method = (m == DerivMethod::Analytic && conn.has_analytic_derivative()) ? DerivMethod::Analytic
                                                                              : DerivMethod::FiniteDifference;
  for (const RVec& x : points)
    for (int i = 0; i < conn.chart.dim; ++i)
      for (int j = i + 1; j < conn.chart.dim; ++j) {
        const double r = residual_norm(conn, curvature(conn, x, i, j, rep.method));
        double& slot = rep.per_pair[{i, j}];
        slot = std::max(slot, r);
        rep.max = std::max(rep.max, r);
      }
  return rep;
}

ClassicalLimit classical_limit_check(const std::function<QuantumConnection(double)>& family,
                                     const ChartField& alpha, const RVec& x, const std::vector<double>& hbars,
                                     double tol) {
  if (hbars.size() < 3) throw InvalidArgument("classical_limit_check: need at least three hbar values");
  for (double h : hbars)
    if (!(h > 0.0 && h <= 0.5)) throw InvalidArgument("classical_limit_check: hbar outside (0, 0.5]");
  const int n = static_cast<int>(hbars.size());
  Eigen::MatrixXcd design(n, 3);
  for (int r = 0; r < n; ++r) design.row(r) << 1.0, std::sqrt(hbars[r]), hbars[r];
  std::vector<QuantumConnection> conns;
  for (double h : hbars) conns.push_back(family(h));
  const int dim = conns.front().chart.dim;
  const RVec a = alpha.eval(x);
  ClassicalLimit out;
  out.constant = RVec::Zero(dim);
  out.error = RVec::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    Vec y(n);
    for (int r = 0; r < n; ++r) {
      const Mat c = conns[r].coeff(x, i);
      y(r) = I * hbars[r] * c.trace() / static_cast<double>(c.rows());
    }
    const Vec coef = design.colPivHouseholderQr().solve(y);
    out.fit_residual = std::max(out.fit_residual, (design * coef - y).norm());
    out.constant(i) = coef(0).real();
    out.error(i) = std::abs(coef(0) - a(i));
  }
  out.is_quantization = out.fit_residual <= tol && out.error.maxCoeff() <= tol;
  return out;
}

InducedConnection induced_xi_connection(const QuantumConnection& conn, const Coframe& f, const ChartField& alpha,
                                        const RVec& x) {
  if (!conn.grade0 || !conn.calibration || !conn.grade_m1)
    throw InvalidArgument("induced_xi_connection: connection carries no grading data");
  const int dim = conn.chart.dim;
  const int rank = f.rank();
  const RMat frame = distribution_frame(f, alpha, x);
  const std::vector<Mat> s = conn.calibration(x);
  if (static_cast<int>(s.size()) != rank) throw InvalidArgument("induced_xi_connection: calibration size");

  InducedConnection out;
  const cplx scale = I * std::sqrt(conn.hbar);
  for (int a = 0; a < rank; ++a) {
    Mat km1 = Mat::Zero(s[a].rows(), s[a].cols());
    for (int k = 0; k < dim; ++k) km1 += frame(k, a) * conn.grade_m1(x, k);
    out.calibration_residual = std::max(out.calibration_residual, residual_norm(conn, scale * km1 - s[a]));
  }
  if (out.calibration_residual > 1e-8)
    throw InvalidArgument("induced_xi_connection: grade -1 part does not match the calibration");

  // Real least squares for w in [grade0_k + d_k, s(f_a)] = sum_b w(b, a) s(f_b).
  auto flatten = [&](const Mat& m) {
    std::vector<double> v;
    const int n = static_cast<int>(m.rows());
    for (int r = 0; r < n; ++r) {
      if (!conn.interior.empty() && std::find(conn.interior.begin(), conn.interior.end(), r) == conn.interior.end())
        continue;
      for (int c = 0; c < n; ++c) {
        if (!conn.interior.empty() &&
            std::find(conn.interior.begin(), conn.interior.end(), c) == conn.interior.end())
          continue;
        v.push_back(m(r, c).real());
        v.push_back(m(r, c).imag());
      }
    }
    return RVec(Eigen::Map<RVec>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  RMat basis(flatten(s[0]).size(), rank);
  for (int b = 0; b < rank; ++b) basis.col(b) = flatten(s[b]);
  const auto qr = basis.colPivHouseholderQr();
  const double h = conn.chart.h;
  out.omega.assign(dim, RMat::Zero(rank, rank));
  for (int k = 0; k < dim; ++k) {
    RVec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    const std::vector<Mat> sp = conn.calibration(xp), sm = conn.calibration(xm);
    const Mat g0 = conn.grade0(x, k);
    for (int a = 0; a < rank; ++a) {
      const Mat target = (sp[a] - sm[a]) / (2.0 * h) + commutator(g0, s[a]);
      const RVec t = flatten(target);
      const RVec w = qr.solve(t);
      out.fit_residual = std::max(out.fit_residual, (basis * w - t).norm());
      out.omega[k].col(a) = w;
    }
  }
  return out;
}

TransportResult transport_generator(const std::function<Mat(double)>& G, double t0, double t1, int steps,
                                    const Vec& psi0, bool check_drift) {
  const double n0 = psi0.norm();
  if (!(n0 > 0.0)) throw InvalidArgument("parallel_transport: zero initial state");
  if (steps < 16) throw InvalidArgument("parallel_transport: fewer than 16 steps");
  const double dt = (t1 - t0) / steps;
  Vec psi = psi0;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const Mat g0 = G(t), gh = G(t + 0.5 * dt), g1 = G(t + dt);
    const Vec k1 = -(g0 * psi);
    const Vec k2 = -(gh * (psi + 0.5 * dt * k1));
    const Vec k3 = -(gh * (psi + 0.5 * dt * k2));
    const Vec k4 = -(g1 * (psi + dt * k3));
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  TransportResult r;
  r.psi = psi;
  r.steps = steps;
  r.norm_drift = std::abs(psi.norm() - n0) / n0;
  if (check_drift && r.norm_drift > kMaxNormDrift)
    throw StepSizeError("parallel_transport: norm drift " + std::to_string(r.norm_drift));
  return r;
}

TransportResult parallel_transport(const QuantumConnection& conn, const PathSpec& path, const Vec& psi0) {
  const int steps = path.steps > 0 ? path.steps
                                   : std::max(16, static_cast<int>(std::ceil(kStepsPerUnit * std::abs(path.t1 - path.t0))));
  auto velocity = [&](double t) -> RVec {
    if (path.velocity) return path.velocity(t);
    const double h = 1e-6;
    return (path.curve(t + h) - path.curve(t - h)) / (2.0 * h);
  };
  auto G = [&](double t) {
    const RVec x = path.curve(t);
    conn.chart.require(x);
    return conn.along(x, velocity(t));
  };
  return transport_generator(G, path.t0, path.t1, steps, psi0);
}

double transition_probability(const QuantumConnection& conn, const PathSpec& path, const Vec& psi_i,
                              const Vec& psi_f) {
  if (std::abs(psi_i.norm() - 1.0) > 1e-10 || std::abs(psi_f.norm() - 1.0) > 1e-10)
    throw InvalidArgument("transition_probability: states must be normalized");
  const Vec out = parallel_transport(conn, path, psi_i).psi;
  return std::min(1.0, std::norm(psi_f.dot(out)));
}

double charge_commutation_check(const QuantumConnection& conn, const std::function<Mat(const RVec&)>& Q,
                                const std::function<Mat(const RVec&, int)>& dQ,
                                const std::vector<RVec>& points) {
  double worst = 0.0;
  const double h = conn.chart.h;
  for (const RVec& x : points) {
    const Mat q = Q(x);
    for (int i = 0; i < conn.chart.dim; ++i) {
      Mat d;
      if (dQ) {
        d = dQ(x, i);
      } else {
        RVec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        d = (Q(xp) - Q(xm)) / (2.0 * h);
      }
      worst = std::max(worst, residual_norm(conn, d + commutator(conn.coeff(x, i), q)));
    }
  }
  return worst;
}

Mat equivariance_operator(const EquivarianceInput& in, const RVec& x, double hbar0) {
  const QuantumConnection conn = in.family(hbar0);
  const Chart& c = conn.chart;
  if (!conn.grade0) throw InvalidArgument("equivariance: connection carries no grade 0 part");
  const double ax = in.A.eval(x).dot(in.X.eval(x));
  if (std::abs(ax) > 1e-10) throw InvalidArgument("equivariance: point is off the cone A(X) = 0");
  const double lx = lie_bracket(in.X, in.U, c, x, DerivMethod::FiniteDifference).cwiseAbs().maxCoeff();
  if (lx > 1e-6) throw InvalidArgument("equivariance: U is not homogeneous");

  auto a_u = [&](const QuantumConnection& q, const RVec& p) { return q.along(p, in.U.eval(p)); };
  auto a0_x = [&](const RVec& p) {
    const RVec X = in.X.eval(p);
    Mat out = Mat::Zero(conn.size(), conn.size());
    for (int k = 0; k < c.dim; ++k)
      if (X(k) != 0.0) out += X(k) * conn.grade0(p, k);
    return out;
  };
  const double h = c.h;
  const RVec X = in.X.eval(x), U = in.U.eval(x);
  const Mat x_of_au = (a_u(conn, x + h * X) - a_u(conn, x - h * X)) / (2.0 * h);
  const Mat u_of_a0x = (a0_x(x + h * U) - a0_x(x - h * U)) / (2.0 * h);
  const Mat gr = grading_derivative([&](double hb) { return a_u(in.family(hb), x); }, hbar0);
  return x_of_au - u_of_a0x + commutator(a0_x(x), a_u(conn, x)) + gr;
}

double equivariance_residual(const EquivarianceInput& in, const RVec& x, double hbar0) {
  const Mat C = equivariance_operator(in, x, hbar0);
  if (!in.probes.empty()) {
    double worst = 0.0;
    for (const Vec& p : in.probes) worst = std::max(worst, (C * p).norm() / p.norm());
    return worst;
  }
  const QuantumConnection conn = in.family(hbar0);
  Mat block = C;
  if (!conn.interior.empty()) {
    block.resize(conn.interior.size(), conn.interior.size());
    for (std::size_t r = 0; r < conn.interior.size(); ++r)
      for (std::size_t k = 0; k < conn.interior.size(); ++k) block(r, k) = C(conn.interior[r], conn.interior[k]);
  }
  return Eigen::JacobiSVD<Mat>(block).singularValues()(0);
}

}  // namespace cq
