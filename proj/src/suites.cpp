#include "cq/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cq/ambient.hpp"
#include "cq/errors.hpp"
#include "cq/metaplectic.hpp"
#include "cq/parallel.hpp"

namespace cq {

bool VerificationReport::pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

using Specs = std::vector<CheckSpec>;
using Params = std::map<std::string, std::string>;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + num(x);
  return out;
}

std::vector<double> hbars_or(const SuiteConfig& c, std::vector<double> d) { return c.hbar.empty() ? d : c.hbar; }
int dim_or(const SuiteConfig& c, int d) { return c.dim > 0 ? c.dim : d; }
int samples_or(const SuiteConfig& c, int d) { return c.samples > 0 ? c.samples : d; }

std::vector<RVec> box(const Chart& c, const RVec& lo, const RVec& hi, int n, unsigned seed) {
  return sample_points(c, lo, hi, n, seed);
}

RVec vec(std::initializer_list<double> v) {
  RVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// [s(f_a), s(f_b)] + i phi(f_a, f_b) on the interior.
double calibration_residual(const ModelInstance& m, const std::vector<RVec>& pts) {
  double worst = 0.0;
  for (const RVec& x : pts) {
    const std::vector<Mat> s = m.conn.calibration(x);
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = 0; b < s.size(); ++b) {
        Mat c = commutator(s[a], s[b]);
        c.diagonal().array() += I * m.coframe.j(a, b);
        worst = std::max(worst, residual_norm(m.conn, c));
      }
  }
  return worst;
}

double classical_limit_error(const ModelInstance& m, const RVec& x) {
  const ClassicalLimit cl = classical_limit_check(m.family, m.alpha, x, {0.05, 0.1, 0.2, 0.3, 0.5});
  return std::max(cl.error.maxCoeff(), cl.fit_residual);
}

double induced_vs_levi(const ModelInstance& m, const std::vector<RVec>& pts) {
  double worst = 0.0;
  for (const RVec& x : pts) {
    const InducedConnection ind = induced_xi_connection(m.conn, m.coframe, m.alpha, x);
    const ConnectionForm lv = levi_connection_solve(m.coframe, m.alpha, m.chart, x);
    worst = std::max(worst, levi_difference_mod_kernel(m.coframe, m.alpha, x, lv, ind.omega));
  }
  return worst;
}

ChartField vector_field(int dim, std::function<RVec(const RVec&)> f) {
  ChartField out;
  out.rank = Rank::Vector;
  out.dim = dim;
  out.eval = std::move(f);
  return out;
}

PathSpec straight(const RVec& a, const RVec& b) {
  PathSpec p;
  p.curve = [a, b](double t) { return RVec(a + t * (b - a)); };
  p.velocity = [a, b](double) { return RVec(b - a); };
  return p;
}

// Transport along a -> c -> b against a -> b.
double path_independence(const QuantumConnection& conn, const RVec& a, const RVec& b, const RVec& c, const Vec& psi) {
  const Vec direct = parallel_transport(conn, straight(a, b), psi).psi;
  const Vec leg = parallel_transport(conn, straight(a, c), psi).psi;
  const Vec bent = parallel_transport(conn, straight(c, b), leg).psi;
  return (direct - bent).norm() / psi.norm();
}

Vec basis(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v(k) = 1.0;
  return v;
}

// ---- suites ----

Specs darboux_suite(const SuiteConfig& c, Params& p) {
  const double hb = hbars_or(c, {1.0}).front();
  const int dim = dim_or(c, 16), n = samples_or(c, 50);
  p["hbar"] = num(hb);
  p["dim"] = std::to_string(dim);
  p["samples"] = std::to_string(n);
  const ModelInstance m = darboux_model(1, hb, dim);
  const auto pts = box(m.chart, RVec::Constant(3, -2.0), RVec::Constant(3, 2.0), n, c.seed);
  Specs s;
  s.push_back({"flatness", 1e-10, "analytic", false, [=] { return flatness_residual(m.conn, pts).max; }});
  s.push_back({"flatness-fd", 1e-6, "fd", false,
               [=] { return flatness_residual(m.conn, pts, DerivMethod::FiniteDifference).max; }});
  s.push_back({"structure", 1e-8, "analytic", false,
               [=] { return structure_residual(m.coframe, m.alpha, m.chart, pts); }});
  s.push_back({"dd-alpha", 1e-6, "fd", false, [=] {
                 double w = 0.0;
                 for (const RVec& x : pts) w = std::max(w, dd_residual(m.alpha, m.chart, x));
                 return w;
               }});
  s.push_back({"calibration", 1e-10, "", false, [=] { return calibration_residual(m, pts); }});
  s.push_back({"classical-limit", 1e-6, "", false, [=] { return classical_limit_error(m, pts[0]); }});
  s.push_back({"induced-vs-levi", 1e-7, "analytic", false, [=] {
                 return induced_vs_levi(m, std::vector<RVec>(pts.begin(), pts.begin() + std::min<std::size_t>(5, pts.size())));
               }});
  s.push_back({"control:halved-calibration-term", 1e-6, "fd", true, [=] {
                 QuantumConnection q = m.conn;
                 q.coeff = [base = m.conn](const RVec& x, int i) -> Mat {
                   return i == 1 ? Mat(0.5 * base.coeff(x, i)) : base.coeff(x, i);
                 };
                 q.dcoeff = nullptr;
                 return flatness_residual(q, pts, DerivMethod::FiniteDifference).max;
               }});
  return s;
}

Specs r3_suite(const SuiteConfig& c, Params& p) {
  const double hb = hbars_or(c, {1.0}).front();
  const int dim = dim_or(c, 16), n = samples_or(c, 50);
  p["hbar"] = num(hb);
  p["dim"] = std::to_string(dim);
  p["samples"] = std::to_string(n);
  const ModelInstance m = r3_model(hb, dim);
  const auto pts = box(m.chart, vec({0.5, 0.0, -1.0}), vec({2.0, 2.0 * M_PI, 1.0}), n, c.seed);
  Specs s;
  s.push_back({"flatness", 1e-10, "analytic", false, [=] { return flatness_residual(m.conn, pts).max; }});
  s.push_back({"flatness-fd", 1e-6, "fd", false,
               [=] { return flatness_residual(m.conn, pts, DerivMethod::FiniteDifference).max; }});
  s.push_back({"structure", 1e-8, "analytic", false,
               [=] { return structure_residual(m.coframe, m.alpha, m.chart, pts); }});
  s.push_back({"calibration", 1e-10, "", false, [=] { return calibration_residual(m, pts); }});
  s.push_back({"classical-limit", 1e-6, "", false, [=] { return classical_limit_error(m, pts[0]); }});
  s.push_back({"induced-vs-levi", 1e-7, "analytic", false, [=] {
                 return induced_vs_levi(m, std::vector<RVec>(pts.begin(), pts.begin() + std::min<std::size_t>(5, pts.size())));
               }});
  s.push_back({"control:dropped-omega", 1e-10, "analytic", true,
               [=] { return flatness_residual(r3_model(hb, dim, true).conn, pts).max; }});
  return s;
}

Polynomial cubic_hamiltonian() { return {{{3, 0}, 1.0}, {{0, 1}, 1.0}}; }

Specs hamsys_suite(const SuiteConfig& c, Params& p) {
  const double hb = hbars_or(c, {1.0}).front();
  const int dim = dim_or(c, 16), n = samples_or(c, 20);
  p["hbar"] = num(hb);
  p["dim"] = std::to_string(dim);
  p["dim_cubic"] = std::to_string(dim + 8);
  p["samples"] = std::to_string(n);
  Specs s;
  const std::vector<std::pair<std::string, Polynomial>> hams = {{"ho", harmonic_oscillator()},
                                                                {"cubic", cubic_hamiltonian()}};
  for (const auto& [tag, H] : hams) {
    const int d = tag == "ho" ? dim : dim + 8;
    const ModelInstance m = hamsys_model(H, hb, d);
    const auto pts = box(m.chart, RVec::Constant(3, -1.0), RVec::Constant(3, 1.0), n, c.seed);
    s.push_back({"flatness[" + tag + "]", 1e-10, "analytic", false, [=] { return flatness_residual(m.conn, pts).max; }});
    s.push_back({"charge[" + tag + "]", 1e-8, "analytic", false, [=, H = H] {
                   return charge_commutation_check(
                       m.conn, [=](const RVec& x) { return hamsys_charge(H, hb, d, x); },
                       [=](const RVec& x, int k) { return hamsys_charge_derivative(H, hb, d, x, k); }, pts);
                 }});
    s.push_back({"classical-limit[" + tag + "]", 1e-6, "", false, [=] { return classical_limit_error(m, pts[0]); }});
  }
  s.push_back({"control:charge-s1-darboux", 1e-8, "analytic", true, [=] {
                 const ModelInstance d = darboux_model(1, hb, dim);
                 const Mat s1 = fock_rep(dim, 1.0).s1;
                 const auto pts = box(d.chart, RVec::Constant(3, -1.0), RVec::Constant(3, 1.0), n, c.seed);
                 return charge_commutation_check(
                     d.conn, [=](const RVec&) { return s1; },
                     [=](const RVec&, int) { return Mat(Mat::Zero(dim, dim)); }, pts);
               }});
  return s;
}

Specs s3_strict_suite(const SuiteConfig& c, Params& p) {
  const auto hbs = hbars_or(c, {2.0, 1.0, 2.0 / 3.0, 0.5, 0.4});
  const int n = samples_or(c, 100);
  p["hbar"] = list(hbs);
  p["samples"] = std::to_string(n);
  const auto pts = box(s3_chart(), vec({0.05, 0.0, 0.0}), vec({M_PI / 2 - 0.05, 2 * M_PI, 2 * M_PI}), n, c.seed);
  Specs s;
  s.push_back({"structure", 1e-8, "analytic", false, [=] { return s3_structure_residual(pts); }});
  for (double hb : hbs) {
    const int dim = c.dim > 0 ? c.dim : static_cast<int>(std::lround(2.0 / hb));
    const std::string tag = "[hbar=" + num(hb) + ",j=" + num((dim - 1) / 2.0) + "]";
    p["spin" + std::string("[hbar=") + num(hb) + "]"] = num((dim - 1) / 2.0);
    s.push_back({"su2" + tag, 1e-12, "", false, [=] { return su2_residual(s3_operators(hb, dim)); }});
    s.push_back({"casimir" + tag, 1e-10, "", false, [=] { return casimir_residual(s3_operators(hb, dim)); }});
    if (dim > 1)
      s.push_back({"flatness" + tag, 1e-9, "analytic", false,
                   [=] { return flatness_residual(s3_strict_model(hb, dim).conn, pts).max; }});
  }
  // Mismatches between "a level with E^dagger |n> = 0 exists" and "2/hbar is a positive integer".
  std::vector<double> scan;
  for (int k = 1; k <= 10; ++k) scan.push_back(2.0 / k);
  for (double h : {0.3, 0.45, 0.7, 0.9, 1.3, 1.7}) scan.push_back(h);
  int disagreements = 0;
  for (const TruncationRow& r : s3_truncation_scan(scan))
    if (!r.agrees_with_stated) ++disagreements;
  p["truncation_stated_disagreements"] = std::to_string(disagreements);
  s.push_back({"truncation", 0.0, "", false, [=] {
                 double bad = 0.0;
                 for (const TruncationRow& r : s3_truncation_scan(scan)) {
                   const double k = 2.0 / r.hbar;
                   const bool integral = std::abs(k - std::round(k)) < 1e-9 && std::round(k) >= 1;
                   const bool found = r.level.has_value() && r.annihilation <= 1e-12;
                   if (found != integral) bad += 1.0;
                   if (found && *r.level != static_cast<int>(std::lround(k)) - 1) bad += 1.0;
                 }
                 return bad;
               }});
  s.push_back({"control:wrong-sqrt-sign", 1e-12, "", true,
               [=] { return su2_residual(s3_operators(0.5, 4, false, true)); }});
  return s;
}

std::vector<ChartField> r5_homogeneous_fields() {
  return {
      vector_field(5, [](const RVec& v) { return vec({-v(1), v(0), 0.0, 0.0, 0.0}); }),
      vector_field(5, [](const RVec& v) { return vec({-v(3), -v(2), v(1), v(0), 0.0}); }),
      vector_field(5, [](const RVec& v) {
        return vec({v(0), v(1), v(2), v(3), 2.0 * v(4) + v.head(4).squaredNorm()});
      }),
  };
}

std::vector<RVec> r5_points(int n, unsigned seed, double rmin, double rmax, bool cone) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RVec> out;
  for (int i = 0; i < n; ++i) {
    RVec x(5);
    for (int k = 0; k < 4; ++k) x(k) = g(rng);
    x.head(4) *= (rmin + (rmax - rmin) * u(rng)) / x.head(4).norm();
    x(4) = cone ? 0.0 : 2.0 * u(rng) - 1.0;
    out.push_back(x);
  }
  return out;
}

Specs s3_ambient_suite(const SuiteConfig& c, Params& p) {
  const auto hbs = hbars_or(c, {1.0, 0.5});
  const int n = samples_or(c, 20);
  AmbientS3Rep rep;
  rep.grid_n = c.grid_n > 0 ? c.grid_n : rep.grid_n;
  rep.half_width = c.grid_l > 0.0 ? c.grid_l : rep.half_width;
  rep.fock_dim = dim_or(c, rep.fock_dim);
  p["hbar"] = list(hbs);
  p["grid"] = std::to_string(rep.grid_n) + "," + num(rep.half_width);
  p["dim"] = std::to_string(rep.fock_dim);
  p["samples"] = std::to_string(n);
  const AmbientFrameData fd = r5_frame_data();
  const auto pts = r5_points(n, c.seed, 0.5, 2.5, false);
  Specs s;
  s.push_back({"torsion", 1e-8, "fd", false, [=] { return frame_torsion_residual(fd, pts); }});
  s.push_back({"iota-x-curvature", 1e-8, "fd", false, [=] { return iota_x_curvature_residual(fd, pts); }});
  s.push_back({"curvature-block", 1e-8, "fd", false, [=] { return r5_curvature_block_residual(pts); }});
  s.push_back({"homothety", 1e-10, "analytic", false, [=] { return homothety_residual(fd, pts); }});
  s.push_back({"homothety-frames", 1e-8, "fd", false, [=] { return homothety_frame_residual(fd, pts); }});
  s.push_back({"lie-x-frames", 1e-7, "fd", false,
               [=] { return lie_x_frames_residual(fd, vec({2.0, 1.0, 1.0, 0.0}), pts); }});
  s.push_back({"parallel-scale", 1e-9, "fd", false, [=] {
                 return ambient_parallel_residual(
                     fd, [](const RVec& x) { return vec({x.head(4).norm(), 0.0, 0.0, 0.0}); }, pts);
               }});
  const auto cone = r5_points(1, c.seed + 1, 3.0, 3.0, true);
  const auto probes = s3_ambient_probes(rep, 3);
  const auto U = r5_homogeneous_fields();
  const char* names[] = {"rot-xy", "rot-quaternion", "euler-shift"};
  auto family = [rep](double h) { return s3_ambient_connection(h, rep); };
  for (double hb : hbs)
    for (std::size_t k = 0; k < U.size(); ++k)
      s.push_back({"equivariance[" + std::string(names[k]) + ",hbar=" + num(hb) + "]", 1e-5, "fd", false, [=] {
                     return equivariance_residual({family, fd.X, U[k], fd.A, probes}, cone[0], hb);
                   }});
  s.push_back({"control:ungraded-x-coefficient", 1e-5, "fd", true, [=] {
                 auto broken = [family](double h) {
                   QuantumConnection q = family(h);
                   q.grade0 = q.coeff;
                   return q;
                 };
                 return equivariance_residual({broken, fd.X, U[0], fd.A, probes}, cone[0], hbs.front());
               }});
  return s;
}

Specs s3_reduction_suite(const SuiteConfig& c, Params& p) {
  const auto hbs = hbars_or(c, {1.0, 2.0 / 3.0, 0.5});
  const int n = samples_or(c, 20);
  p["hbar"] = list(hbs);
  p["samples"] = std::to_string(n);
  const auto pts = box(s3_chart(), vec({0.05, 0.0, 0.0}), vec({M_PI / 2 - 0.05, 2 * M_PI, 2 * M_PI}), n, c.seed);
  Specs s;
  for (double hb : hbs) {
    const std::string tag = "[hbar=" + num(hb) + "]";
    s.push_back({"reduction" + tag, 1e-10, "analytic", false,
                 [=] { return s3_reduce_to_strict(hb, pts).max_difference; }});
    s.push_back({"y-pullback" + tag, 1e-12, "analytic", false,
                 [=] { return s3_reduce_to_strict(hb, pts).y_pullback; }});
    s.push_back({"constraint-linearity" + tag, 0.01, "", false,
                 [=] { return std::abs(s3_reduce_to_strict(hb, pts).eps_ratio() / 10.0 - 1.0); }});
  }
  s.push_back({"control:wrong-sqrt-sign", 1e-10, "analytic", true, [=] {
                 const ModelInstance wrong = s3_strict_model(1.0, 2, false, true);
                 double worst = 0.0;
                 for (const RVec& a : pts) {
                   RVec x = RVec::Zero(5);
                   x.head(4) = s3_embed(a);
                   const RMat jac = s3_embed_jacobian(a);
                   for (int mu = 0; mu < 3; ++mu) {
                     RVec v = RVec::Zero(5);
                     v.head(4) = jac.col(mu);
                     worst = std::max(worst, (s3_ambient_reduced_coeff(1.0, 2, x, v, 0.0) - wrong.conn.coeff(a, mu)).norm());
                   }
                 }
                 return worst;
               }});
  return s;
}

Specs contactization_suite(const SuiteConfig& c, Params& p) {
  const double hb = hbars_or(c, {1.0}).front();
  const int dim = dim_or(c, 10), n = samples_or(c, 10);
  p["hbar"] = num(hb);
  p["dim"] = std::to_string(dim);
  p["samples"] = std::to_string(n);
  Specs s;
  const auto F = make_field(Rank::Scalar, 3, [](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> a(1);
    a(0) = sin(v(0)) * cos(v(2)) + v(1) * v(1) + T(2.0);
    return a;
  });
  for (ContactBase base : {ContactBase::Darboux, ContactBase::R3}) {
    const bool darboux = base == ContactBase::Darboux;
    const std::string tag = darboux ? "darboux/" : "r3/";
    const ContactizationModel m = contactization_model(base, hb, dim);
    const RVec lo = darboux ? vec({-0.5, -0.5, -1.0, -1.0, -1.0}) : vec({-0.5, -0.5, 0.6, 0.0, -1.0});
    const RVec hi = darboux ? vec({0.5, 0.5, 1.0, 1.0, 1.0}) : vec({0.5, 0.5, 2.0, 2.0 * M_PI, 1.0});
    const auto pts = box(m.frames.chart, lo, hi, n, c.seed);
    s.push_back({tag + "torsion", 1e-7, "fd", false, [=] { return frame_torsion_residual(m.frames, pts); }});
    s.push_back({tag + "iota-x-curvature", 1e-7, "fd", false, [=] { return iota_x_curvature_residual(m.frames, pts); }});
    s.push_back({tag + "homothety-frames", 1e-7, "fd", false, [=] { return homothety_frame_residual(m.frames, pts); }});
    s.push_back({tag + "lie-x-frames", 1e-7, "fd", false,
                 [=] { return lie_x_frames_residual(m.frames, vec({2.0, 1.0, 1.0, 0.0}), pts); }});
    s.push_back({tag + "parallel-scale", 1e-8, "fd", false, [=] {
                   return ambient_parallel_residual(
                       m.frames, [](const RVec& x) { return vec({std::exp(x(0)), 0.0, 0.0, 0.0}); }, pts);
                 }});
    s.push_back({tag + "d-operator", 1e-7, "fd", false, [=] { return ambient_d_operator_residual(m, F, 1.5, pts); }});
    if (darboux)
      s.push_back({tag + "flatness-fd", 1e-6, "fd", false, [=] {
                     return flatness_residual(m.family(hb), pts, DerivMethod::FiniteDifference).max;
                   }});
    RVec x = pts[0];
    x(1) = 0.0;
    std::vector<std::pair<std::string, int>> dirs = {{"d-mu", 0}, {"d-t", 4}};
    if (darboux) dirs.push_back({"d-x", 2});
    for (const auto& [name, k] : dirs) {
      const ChartField U = constant_field(Rank::Vector, RVec::Unit(5, k));
      s.push_back({tag + "equivariance[" + name + "]", 1e-5, "fd", false,
                   [=] { return equivariance_residual({m.family, m.frames.X, U, m.frames.A, {}}, x, hb); }});
    }
    if (darboux)
      s.push_back({"control:dropped-quadratic-term", 1e-6, "fd", true, [=] {
                     QuantumConnection q = m.family(hb);
                     q.coeff = [g = q.coeff, g0 = q.grade0](const RVec& y, int k) -> Mat { return g(y, k) - g0(y, k); };
                     return flatness_residual(q, pts, DerivMethod::FiniteDifference).max;
                   }});
  }
  return s;
}

Specs metaplectic_suite(const SuiteConfig& c, Params& p) {
  const int grid = c.grid_n > 0 ? c.grid_n : 1024;
  const double L = c.grid_l > 0.0 ? c.grid_l : 20.0;
  const int n = samples_or(c, 10);
  const double t = 0.3;
  p["grid"] = std::to_string(grid) + "," + num(L);
  p["samples"] = std::to_string(n);
  p["t"] = num(t);
  const GridWavefunction psi = gaussian(grid, L);
  const FreeSymplectic J{};
  const FreeSymplectic S = FreeSymplectic::from_matrix(sp2_S());
  const FreeSymplectic SinvT = FreeSymplectic::from_matrix(sp2_S().inverse() * sp2_T(t));
  auto pairs = [=] {
    std::vector<std::pair<FreeSymplectic, FreeSymplectic>> out;
    for (unsigned k = 0; out.size() < static_cast<std::size_t>(n); ++k) {
      const Mat2 a = random_free(c.seed * 7919u + 2 * k), b = random_free(c.seed * 7919u + 2 * k + 1);
      if (std::abs((a * b)(0, 1)) > 0.5) out.push_back({FreeSymplectic::from_matrix(a), FreeSymplectic::from_matrix(b)});
    }
    return out;
  };
  Specs s;
  s.push_back({"fourier-gaussian", 1e-6, "", false,
               [=] { return projective_residual(psi.samples, free_metaplectic_apply(J, psi).samples); }});
  s.push_back({"fourier-fourth-power", 1e-5, "", false, [=] {
                 GridWavefunction w = psi;
                 for (int k = 0; k < 4; ++k) w = free_metaplectic_apply(J, w);
                 return projective_residual(psi.samples, w.samples);
               }});
  s.push_back({"shear-vs-spectral", 1e-6, "", false, [=] {
                 return projective_residual(spectral_free_propagator(t, psi).samples,
                                            free_metaplectic_apply(FreeSymplectic::from_matrix(sp2_T(t)), psi).samples);
               }});
  s.push_back({"identity", 1e-5, "", false, [=] { return compose_up_to_phase(SinvT, S, psi); }});
  s.push_back({"compose-random", 1e-4, "", false, [=] {
                 double w = 0.0;
                 for (const auto& [a, b] : pairs()) w = std::max(w, compose_up_to_phase(a, b, psi));
                 return w;
               }});
  s.push_back({"conjugation-fourier", 1e-5, "", false,
               [=] { return conjugation_check(S, Eigen::Vector2d(0.0, 1.0), psi); }});
  s.push_back({"conjugation-random", 1e-4, "", false, [=] {
                 std::mt19937_64 rng(c.seed);
                 std::uniform_real_distribution<double> u(-1.0, 1.0);
                 double w = 0.0;
                 for (int k = 0; k < n; ++k) {
                   const Mat2 g = random_free(c.seed * 104729u + k);
                   if (!is_free(g.inverse())) continue;
                   w = std::max(w, conjugation_check(FreeSymplectic::from_matrix(g), Eigen::Vector2d(u(rng), u(rng)), psi));
                 }
                 return w;
               }});
  s.push_back({"norm", 1e-5, "", false, [=] {
                 double w = 0.0;
                 for (const auto& pr : pairs())
                   w = std::max(w, std::abs(l2_norm(free_metaplectic_apply(pr.first, psi)) / l2_norm(psi) - 1.0));
                 return w;
               }});
  s.push_back({"phase-invariance", 1e-12, "", false, [=] {
                 const Vec out = free_metaplectic_apply(S, psi).samples;
                 const Vec ref = psi.samples;
                 const double base = projective_residual(ref, out);
                 std::mt19937_64 rng(c.seed);
                 std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
                 double w = 0.0;
                 for (int k = 0; k < 4; ++k) {
                   const cplx a = std::exp(I * ph(rng)), b = std::exp(I * ph(rng));
                   w = std::max(w, std::abs(projective_residual(a * ref, b * out) - base));
                 }
                 return w;
               }});
  s.push_back({"sp2-fock", 1e-10, "", false, [=] { return sp2_relation_residual(sp2_generators(fock_rep(32, 1.0)), 28); }});
  s.push_back({"sp2-grid", 1e-6, "", false, [=] {
                 const GridOps g = grid_rep(512, 1.0, -L, L);
                 Vec st(512);
                 for (int k = 0; k < 512; ++k) st(k) = std::exp(-0.5 * g.points(k) * g.points(k));
                 return sp2_relation_residual(sp2_generators(g), st);
               }});
  s.push_back({"shear-linearization", 1e-4, "fd", false, [=] { return shear_linearization_residual(psi); }});
  s.push_back({"control:opposite-chirp", 1e-5, "", true, [=] {
                 GridWavefunction mid = free_metaplectic_apply(S, psi);
                 mid = free_metaplectic_apply(SinvT, mid);
                 return projective_residual(lower_triangular_apply(t, psi).samples, mid.samples);
               }});
  return s;
}

RMat random_symplectic2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  RMat M(2, 2);
  M(0, 0) = 1.0 + u(rng);
  M(0, 1) = u(rng);
  M(1, 0) = u(rng);
  M(1, 1) = (1.0 + M(0, 1) * M(1, 0)) / M(0, 0);
  return M;
}

Contractor random_contractor(std::mt19937_64& rng, double weight) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Contractor c;
  c.plus = u(rng);
  c.mid = RVec(2);
  c.mid << u(rng), u(rng);
  c.minus = u(rng);
  c.weight = weight;
  return c;
}

double contractor_diff(const Contractor& a, const Contractor& b) {
  return std::max({std::abs(a.plus - b.plus), (a.mid - b.mid).cwiseAbs().maxCoeff(), std::abs(a.minus - b.minus)});
}

// Omega = exp(a . x) on the R^3 chart.
ChartField exp_linear(const RVec& a) {
  return make_field(Rank::Scalar, 3, [a](const auto& v) {
    using T = typename std::decay_t<decltype(v)>::Scalar;
    VecT<T> o(1);
    o(0) = exp(T(a(0)) * v(0) + T(a(1)) * v(1) + T(a(2)) * v(2));
    return o;
  });
}

double cocycle_residual(int n, unsigned seed) {
  const ModelInstance r3 = r3_model(1.0, 4);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    RVec a1(3), a2(3);
    for (int i = 0; i < 3; ++i) {
      a1(i) = u(rng);
      a2(i) = u(rng);
    }
    const RMat M1 = random_symplectic2(rng), M2 = random_symplectic2(rng);
    // alpha' = Omega_1^2 alpha with coframe Omega_1 M_1 e
    const ChartField alpha2 = make_field(Rank::OneForm, 3, [a1](const auto& v) {
      using T = typename std::decay_t<decltype(v)>::Scalar;
      const T w = exp(T(a1(0)) * v(0) + T(a1(1)) * v(1) + T(a1(2)) * v(2));
      VecT<T> o(3);
      o << T(0.0), w * w * T(0.5) * v(0) * v(0), -w * w;
      return o;
    });
    Coframe f2;
    f2.j = r3.coframe.j;
    for (int a = 0; a < 2; ++a)
      f2.e.push_back(make_field(Rank::OneForm, 3, [a1, M1, a](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::Scalar;
        const T w = exp(T(a1(0)) * v(0) + T(a1(1)) * v(1) + T(a1(2)) * v(2));
        VecT<T> o(3);
        o << w * T(M1(a, 0)), w * T(M1(a, 1)) * v(0), T(0.0);
        return o;
      }));
    RVec x(3);
    x << 1.25 + 1.5 * u(rng), M_PI + 6.0 * u(rng), u(rng);
    const RescaleData d1 = rescale_data_at(exp_linear(a1), r3.alpha, r3.coframe, r3.chart, x, M1);
    const RescaleData d2 = rescale_data_at(exp_linear(a2), alpha2, f2, r3.chart, x, M2);
    const RescaleData d12 = rescale_data_at(exp_linear(a1 + a2), r3.alpha, r3.coframe, r3.chart, x, M2 * M1);
    const Contractor c = random_contractor(rng, 0.5 * t / n - 0.25);
    worst = std::max(worst, contractor_diff(rescale_successive(c, d1, d2), rescale_contractor(c, d12)));
  }
  return worst;
}

double pairing_residual(int n, unsigned seed, bool symplectic) {
  RMat j(2, 2);
  j << 0, 1, -1, 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    RMat M = random_symplectic2(rng);
    if (!symplectic) M(0, 0) *= 1.1;
    const RescaleData d = make_rescale_data(std::exp(u(rng)), RVec(Eigen::Vector2d(u(rng), u(rng))), u(rng), M, j);
    const double w = u(rng);
    const Contractor a = random_contractor(rng, w), b = random_contractor(rng, -w);
    const double before = pairing_J(a, b, j).value;
    const Contractor ra = symplectic ? rescale_contractor(a, d) : rescale_contractor_unchecked(a, d);
    const Contractor rb = symplectic ? rescale_contractor(b, d) : rescale_contractor_unchecked(b, d);
    worst = std::max(worst, std::abs(pairing_J(ra, rb, j).value - before));
  }
  return worst;
}

ContractorConnectionData connection_data(const ModelInstance& m) {
  ContractorConnectionData cd;
  cd.chart = m.chart;
  cd.alpha = m.alpha;
  cd.coframe = m.coframe;
  cd.omega = [m](const RVec& x) { return levi_connection_solve(m.coframe, m.alpha, m.chart, x); };
  const int dim = m.chart.dim, rank = m.coframe.rank();
  cd.P = [dim, rank](const RVec&) { return RMat(RMat::Zero(rank, dim)); };
  cd.Q = [dim](const RVec&) { return RVec(RVec::Zero(dim)); };
  return cd;
}

Specs contractor_suite(const SuiteConfig& c, Params& p) {
  const int n = samples_or(c, 100);
  const int grid = c.grid_n > 0 ? c.grid_n : 256;
  const double L = c.grid_l > 0.0 ? c.grid_l : 12.0;
  p["samples"] = std::to_string(n);
  p["grid"] = std::to_string(grid) + "," + num(L);
  Specs s;
  s.push_back({"cocycle", 1e-8, "analytic", false, [=] { return cocycle_residual(n, c.seed); }});
  s.push_back({"pairing-invariance", 1e-9, "", false, [=] { return pairing_residual(n, c.seed, true); }});
  s.push_back({"unipotent", 1e-10, "", false, [=] {
                 RMat j(2, 2);
                 j << 0, 1, -1, 0;
                 std::mt19937_64 rng(c.seed);
                 std::uniform_real_distribution<double> u(-1.0, 1.0);
                 double w = 0.0;
                 for (int t = 0; t < n; ++t) {
                   const RVec ups = Eigen::Vector2d(u(rng), u(rng));
                   const double chi = u(rng);
                   const Contractor a = random_contractor(rng, u(rng));
                   const RMat id = RMat::Identity(2, 2);
                   const Contractor b = rescale_contractor(rescale_contractor(a, make_rescale_data(1.0, ups, chi, id, j)),
                                                           make_rescale_data(1.0, -ups, -chi, id, j));
                   w = std::max(w, contractor_diff(a, b));
                 }
                 return w;
               }});
  s.push_back({"scale-tractor[darboux]", 1e-9, "fd", false, [=] {
                 const ModelInstance m = darboux_model(1, 1.0, 4);
                 const auto pts = box(m.chart, RVec::Constant(3, -1.0), RVec::Constant(3, 1.0), 10, c.seed);
                 return parallel_scale_check(connection_data(m), constant_field(Rank::Scalar, RVec::Ones(1)), pts);
               }});
  s.push_back({"scale-tractor[r3]", 1e-8, "fd", false, [=] {
                 const ModelInstance m = r3_model(1.0, 4);
                 const auto pts = box(m.chart, vec({0.5, 0.0, -1.0}), vec({2.0, 2.0 * M_PI, 1.0}), 10, c.seed);
                 return parallel_scale_check(connection_data(m), constant_field(Rank::Scalar, RVec::Ones(1)), pts);
               }});
  const ParabolicWavefunction psi =
      make_parabolic_grid(grid, L, grid, L, [](double y, double x) { return cplx(std::exp(-0.5 * (y * y + x * x)), 0.0); });
  const ParabolicData d1{1.2, 0.3, -0.2, 0.1}, d2{0.9, -0.1, 0.25, -0.15};
  s.push_back({"parabolic-identity", 1e-12, "", false,
               [=] { return projective_distance(psi.samples, parabolic_lift(ParabolicData{}, psi).samples); }});
  s.push_back({"parabolic-chirp-modulus", 1e-10, "", false, [=] {
                 const ParabolicWavefunction out = parabolic_lift(ParabolicData{1.0, 0.0, 0.0, 0.4}, psi);
                 return (out.samples.cwiseAbs() - psi.samples.cwiseAbs()).cwiseAbs().maxCoeff();
               }});
  s.push_back({"parabolic-group-law", 1e-4, "", false, [=] {
                 const Mat lhs = parabolic_lift(d1, parabolic_lift(d2, psi)).samples;
                 return projective_distance(parabolic_lift(compose_parabolic(d1, d2), psi).samples, lhs);
               }});
  s.push_back({"parabolic-unitarity", 1e-6, "", false,
               [=] { return std::abs(l2_norm(parabolic_lift(d1, psi)) / l2_norm(psi) - 1.0); }});
  s.push_back({"control:non-symplectic-M", 1e-9, "", true, [=] { return pairing_residual(n, c.seed, false); }});
  return s;
}

Specs transport_suite(const SuiteConfig& c, Params& p) {
  const double hb = hbars_or(c, {1.0}).front();
  const int dim = dim_or(c, 16);
  p["hbar"] = num(hb);
  p["dim"] = std::to_string(dim);
  p["steps_per_unit"] = std::to_string(kStepsPerUnit);
  const ModelInstance ho = hamsys_model(harmonic_oscillator(), hb, dim);
  const double T = 2.0 * M_PI;
  auto loop = [=] {
    Vec psi = Vec::Zero(dim);
    for (int k = 0; k < 4; ++k) psi(k) = std::exp(-0.5 * k) * std::exp(I * static_cast<double>(k));
    psi /= psi.norm();
    return parallel_transport(ho.conn, straight(vec({0.0, 0.0, 0.0}), vec({0.0, 0.0, T})), psi);
  };
  auto start = [=] {
    Vec psi = Vec::Zero(dim);
    for (int k = 0; k < 4; ++k) psi(k) = std::exp(-0.5 * k) * std::exp(I * static_cast<double>(k));
    return Vec(psi / psi.norm());
  };
  Specs s;
  s.push_back({"schrodinger-oracle", 1e-6, "", false, [=] {
                 const Mat U = (-T * ho.conn.coeff(vec({0.0, 0.0, 0.0}), 2)).exp();
                 return (loop().psi - U * start()).norm();
               }});
  s.push_back({"half-period-sign", 1e-6, "", false, [=] { return (loop().psi + start()).norm(); }});
  s.push_back({"norm-drift", 1e-6, "", false, [=] { return loop().norm_drift / T; }});
  s.push_back({"transition-probability", 1e-6, "", false, [=] {
                 const Vec e0 = basis(dim, 0);
                 return std::abs(transition_probability(ho.conn, straight(vec({0.0, 0.0, 0.0}), vec({0.0, 0.0, T})), e0, e0) - 1.0);
               }});
  s.push_back({"path-independence[darboux]", 1e-5, "", false, [=] {
                 const ModelInstance m = darboux_model(1, hb, dim);
                 return path_independence(m.conn, vec({0.0, 0.0, 0.0}), vec({0.3, 0.2, 0.5}), vec({0.3, -0.2, 0.1}),
                                          basis(dim, 0));
               }});
  s.push_back({"path-independence[hamsys]", 1e-5, "", false, [=] {
                 return path_independence(ho.conn, vec({0.0, 0.0, 0.0}), vec({0.3, 0.2, 0.5}), vec({0.3, -0.2, 0.1}),
                                          basis(dim, 0));
               }});
  s.push_back({"control:path-dependence[r3-no-omega]", 1e-5, "", true, [=] {
                 const ModelInstance m = r3_model(hb, dim, true);
                 return path_independence(m.conn, vec({1.0, 0.0, 0.0}), vec({1.3, 0.5, 0.2}), vec({1.3, 0.0, 0.2}),
                                          basis(dim, 0));
               }});
  return s;
}

}  // namespace

const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> reg = {
      {"darboux", "Darboux model: flatness, structure, calibration, classical limit", darboux_suite},
      {"r3", "R^3 model: flatness, induced connection, classical limit", r3_suite},
      {"hamsys", "Hamiltonian systems: flatness, charge conservation", hamsys_suite},
      {"s3-strict", "strict S^3: su(2), Casimir, flatness, truncation", s3_strict_suite},
      {"s3-ambient", "ambient R^5: frame equations, parallel scale, equivariance", s3_ambient_suite},
      {"s3-reduction", "ambient S^3 reduced to the strict model", s3_reduction_suite},
      {"contactization", "contactization frames, D-operator, flatness, equivariance", contactization_suite},
      {"metaplectic", "generalized Fourier transforms and the conjugation law", metaplectic_suite},
      {"contractor", "rescaling cocycle, pairing, scale tractors, parabolic lifts", contractor_suite},
      {"transport", "parallel transport, Schrodinger recovery, path independence", transport_suite},
  };
  return reg;
}

const SuiteInfo* find_suite(const std::string& name) {
  for (const SuiteInfo& s : suite_registry())
    if (s.name == name) return &s;
  return nullptr;
}

VerificationReport run_suite(const SuiteConfig& cfg) {
  const SuiteInfo* info = find_suite(cfg.suite);
  if (!info) throw UsageError("unknown suite '" + cfg.suite + "' (see `cq list`)");
  for (double h : cfg.hbar)
    if (!(h > 0.0)) throw UsageError("hbar values must be positive");
  if (cfg.dim < 0 || cfg.samples < 0 || cfg.grid_n < 0 || cfg.grid_l < 0.0)
    throw UsageError("dim, samples and grid must be non-negative");

  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.suite = cfg.suite;
  rep.params["seed"] = std::to_string(cfg.seed);
  Specs specs;
  try {
    specs = info->build(cfg, rep.params);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("suite '" + cfg.suite + "': invalid parameters: " + e.what());
  }
  for (const auto& [key, value] : cfg.tol) {
    bool found = false;
    for (CheckSpec& s : specs)
      if (s.name == key) {
        s.tolerance = value;
        found = true;
      }
    if (!found) throw UsageError("--tol: suite '" + cfg.suite + "' has no check named '" + key + "'");
  }
  if (!cfg.only.empty()) {
    std::erase_if(specs, [&](const CheckSpec& s) {
      return std::none_of(cfg.only.begin(), cfg.only.end(), [&](const std::string& p) { return s.name.rfind(p, 0) == 0; });
    });
    if (specs.empty()) throw UsageError("--only: no check of suite '" + cfg.suite + "' matches");
  }
  rep.checks.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    const CheckSpec& s = specs[i];
    CheckResult& r = rep.checks[i];
    r.name = s.name;
    r.tolerance = s.tolerance;
    r.method = s.method;
    r.control = s.control;
    try {
      r.residual = s.run();
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.error = e.what();
    }
    const bool within = std::isfinite(r.residual) && r.residual <= r.tolerance;
    r.pass = s.control ? (r.error.empty() && !within) : within;
  });
  rep.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace cq
