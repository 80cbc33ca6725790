#pragma once

#include <Eigen/Dense>

#include "cq/operator_core.hpp"

namespace cq {

using Mat2 = Eigen::Matrix2d;

// n = 1 blocks of a symplectic matrix [[A, B], [C, D]] with B != 0.
struct FreeSymplectic {
  double A = 0.0, B = 1.0, C = -1.0, D = 0.0;
  Mat2 matrix() const;
  static FreeSymplectic from_matrix(const Mat2& g);
};

bool is_free(const Mat2& g, double tol = 1e-8);

struct GridWavefunction {
  RVec y;
  Vec samples;
  double dy() const { return (y(y.size() - 1) - y(0)) / (y.size() - 1); }
};

GridWavefunction make_wavefunction(int n, double L, const std::function<cplx(double)>& f);
GridWavefunction gaussian(int n = 1024, double L = 20.0, double center = 0.0, double width = 1.0);
double l2_norm(const GridWavefunction& psi);

// Generalized Fourier transform with a quadratic generating function, trapezoid
// quadrature; output defined up to a global phase.
GridWavefunction free_metaplectic_apply(const FreeSymplectic& F, const GridWavefunction& psi);
// [[1, 0], [c, 1]] acts as multiplication by exp(i c y^2 / 2).
GridWavefunction lower_triangular_apply(double c, const GridWavefunction& psi);
// Direct lift when g is free, multiplication when lower triangular.
GridWavefunction metaplectic_oracle(const Mat2& g, const GridWavefunction& psi);
// exp(-i t p^2 / 2) as an FFT multiplier.
GridWavefunction spectral_free_propagator(double t, const GridWavefunction& psi);

// min over phi of |a - e^{i phi} b| / |a|.
double projective_residual(const Vec& a, const Vec& b);

double compose_up_to_phase(const FreeSymplectic& F1, const FreeSymplectic& F2, const GridWavefunction& psi);

// s(u) psi = u1 (1/i) psi' - u2 y psi; spectral derivative.
Vec heisenberg_apply(const Eigen::Vector2d& u, const GridWavefunction& psi);
double conjugation_check(const FreeSymplectic& g, const Eigen::Vector2d& u, const GridWavefunction& psi);

struct Sp2Generators {
  Mat m_pp, m_mm, m_pm;
  Mat s_plus, s_minus;
};
// s_+ is position, s_- momentum.
Sp2Generators sp2_generators(const FockOps& rep);
Sp2Generators sp2_generators(const GridOps& rep);
// Residual of [m_mm, m_pp] = -2i m_pm on the leading `interior` block.
double sp2_relation_residual(const Sp2Generators& g, int interior);
// Same relation applied to a smooth state (grid representations).
double sp2_relation_residual(const Sp2Generators& g, const Vec& state);

// Projective tangent of t -> M_T psi at t = 0 against -(i/2) s_-^2 psi.
double shear_linearization_residual(const GridWavefunction& psi, double h = 1e-3);

Mat2 sp2_S();
Mat2 sp2_T(double t);
// Random element of Sp(2) with |B| bounded away from zero.
Mat2 random_free(unsigned seed);

}  // namespace cq
