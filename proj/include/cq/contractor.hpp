#pragma once

#include <string>

#include "cq/geometry.hpp"

namespace cq {

// (v+, v, v-) in a scale; `mid` holds distribution-frame components.
struct Contractor {
  std::string scale = "alpha";
  double plus = 0.0;
  RVec mid;
  double minus = 0.0;
  double weight = 0.0;
};

struct Density {
  double value = 0.0;
  double weight = 0.0;
};

struct RescaleData {
  double Omega = 1.0;
  RVec upsilon;        // frame components Upsilon(f_a)
  RVec upsilon_sharp;  // frame components of Upsilon^sharp
  double chi = 0.0;
  RMat M;
  RMat j;
  std::string target_scale = "alpha'";
};

// Fills upsilon_sharp from phi(X, .) = Upsilon with phi(u, v) = u^T j v.
RescaleData make_rescale_data(double Omega, const RVec& upsilon, double chi, const RMat& M, const RMat& j);
RescaleData identity_rescale(const RMat& j);
bool is_symplectic(const RMat& M, const RMat& j, double tol = 1e-10);

Contractor rescale_contractor(const Contractor& c, const RescaleData& d);
// Same transformation without validating M or Omega (negative controls only).
Contractor rescale_contractor_unchecked(const Contractor& c, const RescaleData& d);
// Successive rescaling: `second` is expressed relative to the scale produced by
// `first`; its shear factor acts first (pulled back to the original frame).
Contractor rescale_successive(const Contractor& c, const RescaleData& first, const RescaleData& second);
// Plain composition second(first(c)), kept for diagnostics.
Contractor rescale_naive_compose(const Contractor& c, const RescaleData& first, const RescaleData& second);

Density pairing_J(const Contractor& u, const Contractor& v, const RMat& j);

// Rescaling data of Omega at x, read in the coframe of alpha.
RescaleData rescale_data_at(const ChartField& Omega, const ChartField& alpha, const Coframe& f, const Chart& c,
                            const RVec& x, const RMat& M, DerivMethod m = DerivMethod::Analytic);

// D_A nu = (1/2 L_rho nu, d^alpha nu, w nu); `mid` as a coordinate 1-form.
struct CoContractor {
  double top = 0.0;
  RVec mid;
  double bottom = 0.0;
  double weight = 0.0;
};

CoContractor d_operator(const ChartField& nu, double w, const ChartField& alpha, const Chart& c, const RVec& x,
                        DerivMethod m = DerivMethod::Analytic);
// Index raise through J: (v+, v, v-) = (-bottom, (mid)^sharp, top).
Contractor raise(const CoContractor& d, const ChartField& alpha, const Coframe& f, const Chart& c, const RVec& x,
                 DerivMethod m = DerivMethod::Analytic);

struct ContractorConnectionData {
  Chart chart;
  ChartField alpha;
  Coframe coframe;
  std::function<ConnectionForm(const RVec&)> omega;  // xi-connection, frame indices
  std::function<RMat(const RVec&)> P;                // P(a, k): dx^k coefficient of P^a
  std::function<RVec(const RVec&)> Q;                // coordinate 1-form
};

struct ContractorField {
  ChartField plus;   // scalar
  ChartField mid;    // frame components (size 2n)
  ChartField minus;  // scalar
};

Contractor connection_apply(const ContractorConnectionData& cd, const RVec& z, const ContractorField& V,
                            const RVec& x);
// D^A sigma as a field (finite-difference derivatives throughout).
ContractorField scale_tractor(const ChartField& sigma, const ContractorConnectionData& cd);
double parallel_scale_check(const ContractorConnectionData& cd, const ChartField& sigma,
                            const std::vector<RVec>& points);

// Parabolic metaplectic lifts on a (y, x) grid for a single distribution pair.
struct ParabolicData {
  double Omega = 1.0;
  double a = 0.0;  // pi_1(Upsilon^sharp)
  double b = 0.0;  // pi_2(Upsilon^sharp)
  double chi = 0.0;
};

struct ParabolicWavefunction {
  RVec y, x;
  Mat samples;  // rows: y, cols: x
};

ParabolicData parabolic_from(const RescaleData& d);
ParabolicData compose_parabolic(const ParabolicData& first, const ParabolicData& second);
ParabolicWavefunction make_parabolic_grid(int ny, double ly, int nx, double lx,
                                          const std::function<cplx(double, double)>& f);
// Chirp x shear x dilation; the dilation resamples in y with a cubic B-spline and
// zero extension, the shear translates in x spectrally.
ParabolicWavefunction parabolic_lift(const ParabolicData& d, const ParabolicWavefunction& psi);
double l2_norm(const ParabolicWavefunction& psi);
// Relative L2 distance after aligning the global phase on the reference's largest sample.
double projective_distance(const Mat& reference, const Mat& other);

}  // namespace cq
