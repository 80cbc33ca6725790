#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cq/geometry.hpp"

namespace cq {

// d + A with coefficients A_i(x) acting on a fixed finite representation.
struct QuantumConnection {
  std::string name;
  Chart chart;
  HilbertRep rep;
  double hbar = 1.0;
  std::function<Mat(const RVec&, int)> coeff;
  std::function<Mat(const RVec&, int, int)> dcoeff;  // (x, i, k) -> d_k A_i
  std::vector<int> interior;                         // rows/cols trusted under truncation

  // Optional grading data.
  std::function<Mat(const RVec&, int)> grade0;       // grade 0 part of A_i
  std::function<std::vector<Mat>(const RVec&)> calibration;  // s(f_a) for the distribution frame
  std::function<Mat(const RVec&, int)> grade_m1;     // grade -1 part of A_i

  int size() const;
  Mat along(const RVec& x, const RVec& v) const;
  bool has_analytic_derivative() const { return static_cast<bool>(dcoeff); }
};

QuantumConnection zero_connection(const Chart& c, int dim);
double residual_norm(const QuantumConnection& conn, const Mat& m);

// d_i A_j - d_j A_i + [A_i, A_j].
Mat curvature(const QuantumConnection& conn, const RVec& x, int i, int j,
              DerivMethod m = DerivMethod::Analytic);

struct CurvatureReport {
  std::map<std::pair<int, int>, double> per_pair;
  double max = 0.0;
  DerivMethod method = DerivMethod::Analytic;
};

CurvatureReport flatness_residual(const QuantumConnection& conn, const std::vector<RVec>& points,
                                  DerivMethod m = DerivMethod::Analytic);

struct ClassicalLimit {
  RVec constant;   // extrapolated i hbar A_i scalar part at hbar -> 0
  RVec error;      // |constant - alpha_i| (including any imaginary part)
  double fit_residual = 0.0;
  bool is_quantization = false;
};

ClassicalLimit classical_limit_check(const std::function<QuantumConnection(double)>& family,
                                     const ChartField& alpha, const RVec& x, const std::vector<double>& hbars,
                                     double tol = 1e-6);

// w[k](b, a): dx^k coefficient of the induced connection acting on frame components.
struct InducedConnection {
  ConnectionForm omega;
  double calibration_residual = 0.0;
  double fit_residual = 0.0;
};

InducedConnection induced_xi_connection(const QuantumConnection& conn, const Coframe& f, const ChartField& alpha,
                                        const RVec& x);

struct PathSpec {
  std::function<RVec(double)> curve;
  std::function<RVec(double)> velocity;  // central differences when empty
  double t0 = 0.0, t1 = 1.0;
  int steps = 0;  // 0: 4096 per unit parameter
};

struct TransportResult {
  Vec psi;
  double norm_drift = 0.0;
  int steps = 0;
};

inline constexpr int kStepsPerUnit = 4096;
inline constexpr double kMaxNormDrift = 1e-3;

// d psi/dt = -G(t) psi by classical RK4.
TransportResult transport_generator(const std::function<Mat(double)>& G, double t0, double t1, int steps,
                                    const Vec& psi0, bool check_drift = true);
TransportResult parallel_transport(const QuantumConnection& conn, const PathSpec& path, const Vec& psi0);
double transition_probability(const QuantumConnection& conn, const PathSpec& path, const Vec& psi_i,
                              const Vec& psi_f);

// max |d_i Q + [A_i, Q]| over points and directions.
double charge_commutation_check(const QuantumConnection& conn, const std::function<Mat(const RVec&)>& Q,
                                const std::function<Mat(const RVec&, int)>& dQ,
                                const std::vector<RVec>& points);

struct EquivarianceInput {
  std::function<QuantumConnection(double)> family;
  ChartField X;
  ChartField U;
  ChartField A;             // ambient contact form, for the cone condition
  std::vector<Vec> probes;  // when non-empty the residual is max |C psi| / |psi|
};

// [grade0(X) + X + gr, U + A(U)] at x; returns the operator C.
Mat equivariance_operator(const EquivarianceInput& in, const RVec& x, double hbar0);
double equivariance_residual(const EquivarianceInput& in, const RVec& x, double hbar0);

}  // namespace cq
