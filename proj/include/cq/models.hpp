#pragma once

#include <string>
#include <vector>

#include "cq/connection.hpp"
#include "cq/contractor.hpp"

namespace cq {

struct ModelInstance {
  std::string name;
  Chart chart;
  ChartField alpha;
  Coframe coframe;
  double hbar = 1.0;
  QuantumConnection conn;
  std::function<QuantumConnection(double)> family;  // same representation, varying hbar
};

// Indices of a tensor product of `modes` Fock spaces of size `dim` whose
// per-mode level stays below dim - margin.
std::vector<int> fock_interior(int dim, int margin, int modes = 1);

// Chart (x^1..x^n, p_1..p_n, t), alpha = p dx - dt.
ModelInstance darboux_model(int n, double hbar, int fock_dim);

// Chart (r, theta, z), alpha = r^2 dtheta / 2 - dz. `drop_omega` removes the
// grade 0 term (negative control).
ModelInstance r3_model(double hbar, int fock_dim, bool drop_omega = false);
Mat r3_s_minus(const FockOps& f, double theta);
Mat r3_s_plus(const FockOps& f, double theta);

// Chart (q, p, t), alpha = p dq - H dt; polynomial keys (i, j) for q^i p^j.
ModelInstance hamsys_model(const Polynomial& H, double hbar, int fock_dim);
Polynomial poly_d(const Polynomial& p, int dq, int dp);
// i W[H(p - i d_s, q + s)] generalised to hbar; equals the t coefficient.
Mat hamsys_charge(const Polynomial& H, double hbar, int fock_dim, const RVec& x);
Mat hamsys_charge_derivative(const Polynomial& H, double hbar, int fock_dim, const RVec& x, int k);
Polynomial harmonic_oscillator();

// Frames, connection matrix and contact data of an ambient space.
struct AmbientFrameData {
  Chart chart;
  ChartField A;
  ChartField X;
  RMat J;
  std::function<RMat(const RVec&)> E;                    // rows E^A, cols dx^k
  std::function<std::vector<RMat>(const RVec&)> Omega;   // Omega[k](A, B)
  double h = 1e-4;                                       // fourth-order stencil step
};

int ambient_rank(const AmbientFrameData& d);
// max |dE^A + Omega^A_B ^ E^B|
double frame_torsion_residual(const AmbientFrameData& d, const std::vector<RVec>& points);
// F[k*dim + l](A, B) = coefficient of dx^k ^ dx^l (full antisymmetric array)
std::vector<RMat> ambient_curvature(const AmbientFrameData& d, const RVec& x);
double iota_x_curvature_residual(const AmbientFrameData& d, const std::vector<RVec>& points);
// max |d I^A + Omega^A_B I^B|
double ambient_parallel_residual(const AmbientFrameData& d, const std::function<RVec(const RVec&)>& I,
                                 const std::vector<RVec>& points);
// max |L_X E^A - weights^A E^A|
double lie_x_frames_residual(const AmbientFrameData& d, const RVec& weights, const std::vector<RVec>& points);
// max |d X^A + Omega^A_B X^B - E^A| with X^A = E^A(X)
double homothety_frame_residual(const AmbientFrameData& d, const std::vector<RVec>& points);
// max |L_X A - 2A|
double homothety_residual(const AmbientFrameData& d, const std::vector<RVec>& points);

// Grade 0 term (1/2i) beta^{CD} S_C S_D with [., S_A] = Omega^C_A S_C for [S_A, S_B] = -i J_AB.
Mat quadratic_term(const RMat& omega_v, const RMat& J, const std::vector<Mat>& S);

enum class ContactBase { Darboux, R3 };

struct ContactizationModel {
  ContactBase base;
  ModelInstance base_model;
  AmbientFrameData frames;
  std::function<RMat(const RVec&)> P;  // P(a, k) on the base chart
  std::function<RVec(const RVec&)> Q;
  std::function<QuantumConnection(double)> family;  // two-mode hbar-free calibration
  std::vector<Mat> S;                               // (+, a..., -)
};

// Chart (mu, tau, base coordinates); A = e^{2 mu} alpha + d tau, X = d_mu + 2 tau d_tau.
// The base xi-connection comes from levi_connection_solve with P = Q = 0.
ContactizationModel contactization_model(ContactBase base, double hbar, int fock_dim);

// Ambient D f = df - (A - X^flat / 2) L_R f in the E^A basis, scaled by
// e^{-w mu} (1, e^{mu}, e^{2 mu}) on the (-, a, +) slots, against the intrinsic
// triple (w F, d-bar F, L_rho F / 2).
double ambient_d_operator_residual(const ContactizationModel& m, const ChartField& F, double w,
                                   const std::vector<RVec>& points);

}  // namespace cq
