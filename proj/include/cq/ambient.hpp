#pragma once

#include <vector>

#include "cq/models.hpp"
#include "cq/s3.hpp"

namespace cq {

// R^5 with coordinates (x, y, z, w, u), A = lambda_I + du, X = Euler + 2u d_u,
// frames (2 lambda_I, lambda_J / r, lambda_K / r, d log r).
AmbientFrameData r5_frame_data();
std::vector<ChartField> r5_lambda_forms();  // lambda_I, lambda_J, lambda_K
ChartField r5_log_r_form();                 // Y = d log r

// F(A, B) as 2-forms against lambda_J ^ lambda_K / r^4 in the (1, 2) slot.
double r5_curvature_block_residual(const std::vector<RVec>& points);

// Representation: grid (S_+ = sqrt(hbar) x, S_- = -i sqrt(hbar) d/dx) times a
// Fock mode (A = sqrt(hbar) a, H = hbar (N + 1/2)).
struct AmbientS3Rep {
  int grid_n = 48;
  double half_width = 0.4;
  int fock_dim = 5;
};

QuantumConnection s3_ambient_connection(double hbar, const AmbientS3Rep& rep);
// Smooth probe states g(x) |n> with a narrow Gaussian g centred at the origin.
std::vector<Vec> s3_ambient_probes(const AmbientS3Rep& rep, int levels, double width = 0.05);

// Coefficient operator of the ambient connection at x along v with S_+ replaced
// by the scalar s, acting on the Fock factor only (S_- terms are returned
// separately through `y_coefficient`).
Mat s3_ambient_reduced_coeff(double hbar, int fock_dim, const RVec& x, const RVec& v, double s,
                             double* y_coefficient = nullptr);

struct ReductionReport {
  double max_difference = 0.0;  // against the strict model, S_+ -> 0
  double y_pullback = 0.0;      // |Y(v)| for pulled back tangent vectors
  double eps_diff_1 = 0.0;      // difference at S_+ = 1e-3
  double eps_diff_2 = 0.0;      // difference at S_+ = 1e-4
  double eps_ratio() const { return eps_diff_2 > 0.0 ? eps_diff_1 / eps_diff_2 : 0.0; }
};

ReductionReport s3_reduce_to_strict(double hbar, const std::vector<RVec>& s3_points);

}  // namespace cq
