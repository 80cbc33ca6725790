#pragma once

#include <optional>
#include <vector>

#include "cq/models.hpp"

namespace cq {

// Chart (psi, theta1, theta2) with psi in (0, pi/2).
Chart s3_chart();
// lambda_i, lambda_j, lambda_k as fields on the S^3 chart.
std::vector<ChartField> s3_coframe_forms();
// max |d lambda_a - lambda_b ^ lambda_c| over cyclic (a, b, c).
double s3_structure_residual(const std::vector<RVec>& points, DerivMethod m = DerivMethod::Analytic);
// Embedding into R^4 and its Jacobian (rows x, y, z, w).
RVec s3_embed(const RVec& angles);
RMat s3_embed_jacobian(const RVec& angles);

struct S3Operators {
  double hbar = 1.0;
  Mat Li, Lj, Lk, E, Ed;
};

// L_i = 1 - N - hbar/2, E = sqrt(1 - (N + hbar)/2) a; `wrong_sign` uses the "+"
// variant of the square root.
S3Operators s3_operators(double hbar, int dim, bool clamp = false, bool wrong_sign = false);
double su2_residual(const S3Operators& ops);
double casimir_residual(const S3Operators& ops);

ModelInstance s3_strict_model(double hbar, int fock_dim, bool clamp = false, bool wrong_sign = false);

struct TruncationRow {
  double hbar = 0.0;
  std::optional<int> level;       // n with E^dagger |n> = 0
  int dim = 0;                    // level + 1
  double spin = 0.0;              // (dim - 1) / 2
  double annihilation = 0.0;      // |E^dagger e_n| from the operator
  bool stated_condition = false;   // 1 - hbar/2 a non-positive integer
  double stated_spin = 0.0;        // (hbar - 2) / 4
  bool agrees_with_stated = false;
};

std::vector<TruncationRow> s3_truncation_scan(const std::vector<double>& hbar_grid);

}  // namespace cq
