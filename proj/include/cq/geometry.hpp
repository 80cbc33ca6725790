#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "cq/operator_core.hpp"

namespace cq {

enum class Rank { Scalar, OneForm, TwoForm, Vector };
enum class DerivMethod { Analytic, FiniteDifference };

const char* method_tag(DerivMethod m);

struct Chart {
  int dim = 3;
  std::vector<std::string> names;
  std::function<bool(const RVec&)> domain = [](const RVec&) { return true; };
  double h = 1e-5;
  void require(const RVec& x) const;
};

// Coefficients: scalar -> size 1, 1-form/vector -> size dim,
// 2-form -> dim*dim column-major antisymmetric matrix F with F = 1/2 F_ij dx^i^dx^j.
struct ChartField {
  Rank rank = Rank::Scalar;
  int dim = 0;
  std::function<RVec(const RVec&)> eval;
  std::function<RMat(const RVec&)> jacobian;  // rows: components, cols: coordinates
  bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using ADScalar = Eigen::AutoDiffScalar<RVec>;

// Builds a field from a generic lambda `f(const VecT<T>&) -> VecT<T>`;
// the Jacobian comes from forward-mode automatic differentiation.
template <class F>
ChartField make_field(Rank rank, int dim, F f) {
  ChartField out;
  out.rank = rank;
  out.dim = dim;
  out.eval = [f](const RVec& x) -> RVec { return f(x); };
  out.jacobian = [f, dim](const RVec& x) -> RMat {
    VecT<ADScalar> xa(dim);
    for (int i = 0; i < dim; ++i) xa(i) = ADScalar(x(i), dim, i);
    const VecT<ADScalar> y = f(xa);
    RMat jac = RMat::Zero(y.size(), dim);
    for (Eigen::Index k = 0; k < y.size(); ++k)
      if (y(k).derivatives().size() == dim) jac.row(k) = y(k).derivatives().transpose();
    return jac;
  };
  return out;
}

ChartField constant_field(Rank rank, const RVec& coeffs);
// Field without analytic derivatives; exercises the finite-difference path.
ChartField strip_jacobian(ChartField f);

RMat field_jacobian(const ChartField& f, const Chart& c, const RVec& x, DerivMethod m);
RMat as_two_form(const RVec& coeffs, int dim);

// Gradient for scalars, dF (as matrix) for 1-forms.
RVec exterior_derivative(const ChartField& f, const Chart& c, const RVec& x,
                         DerivMethod m = DerivMethod::Analytic);
RMat d_one_form(const ChartField& f, const Chart& c, const RVec& x, DerivMethod m = DerivMethod::Analytic);
// The 2-form field d(alpha), evaluated through `m`.
ChartField d_field(const ChartField& one_form, const Chart& c, DerivMethod m = DerivMethod::Analytic);
// Max |d(d alpha)| with the outer derivative by central differences.
double dd_residual(const ChartField& one_form, const Chart& c, const RVec& x);

RMat wedge(const RVec& a, const RVec& b);
double interior(const RVec& v, const RVec& one_form);
RVec interior(const RVec& v, const RMat& two_form);
// Lie derivative of a 1-form along a vector field via Cartan's formula.
RVec lie_derivative(const ChartField& v, const ChartField& a, const Chart& c, const RVec& x,
                    DerivMethod m = DerivMethod::Analytic);
// Lie derivative of a vector field along a vector field ([v, u]).
RVec lie_bracket(const ChartField& v, const ChartField& u, const Chart& c, const RVec& x,
                 DerivMethod m = DerivMethod::Analytic);

struct SolveInfo {
  double condition = 1.0;
  bool ill_conditioned() const { return condition > 1e8; }
};

RVec reeb_vector(const ChartField& alpha, const Chart& c, const RVec& x,
                 DerivMethod m = DerivMethod::Analytic, SolveInfo* info = nullptr);

// phi(v, .) with phi = d alpha; v must satisfy alpha(v) = 0.
RVec flat(const RVec& v, const ChartField& alpha, const Chart& c, const RVec& x,
          DerivMethod m = DerivMethod::Analytic);
// Unique v with alpha(v) = 0 and phi(v, .) = omega; omega must annihilate rho.
RVec sharp(const RVec& omega, const ChartField& alpha, const Chart& c, const RVec& x,
           DerivMethod m = DerivMethod::Analytic);

struct Coframe {
  std::vector<ChartField> e;
  RMat j;
  int rank() const { return static_cast<int>(e.size()); }
};

RMat coframe_matrix(const Coframe& f, const RVec& x);
// Dual frame f_a of the distribution: e^a(f_b) = delta, alpha(f_b) = 0.
RMat distribution_frame(const Coframe& f, const ChartField& alpha, const RVec& x);

double structure_residual(const Coframe& f, const ChartField& alpha, const Chart& c,
                          const std::vector<RVec>& points, DerivMethod m = DerivMethod::Analytic);

// omega[k](a, b): coefficient of dx^k in omega^a_b.
using ConnectionForm = std::vector<RMat>;

// Torsion-free (d e^a + omega^a_b ^ e^b = 0) sp-valued connection with vanishing
// totally symmetric part.
ConnectionForm levi_connection_solve(const Coframe& f, const ChartField& alpha, const Chart& c,
                                     const RVec& x, DerivMethod m = DerivMethod::Analytic);
double torsion_residual(const Coframe& f, const ConnectionForm& w, const Chart& c, const RVec& x,
                        DerivMethod m = DerivMethod::Analytic);
// Norm of the difference of two torsion-free connections after removing the
// totally symmetric (Cartan kernel) part.
double levi_difference_mod_kernel(const Coframe& f, const ChartField& alpha, const RVec& x,
                                  const ConnectionForm& w1, const ConnectionForm& w2);

struct RescaleDecomposition {
  RVec upsilon;  // coordinate 1-form, annihilates rho
  double chi = 0.0;
};

RescaleDecomposition rescale_decompose(const ChartField& omega_scalar, const ChartField& alpha,
                                       const Chart& c, const RVec& x,
                                       DerivMethod m = DerivMethod::Analytic);

std::vector<RVec> sample_points(const Chart& c, const RVec& lo, const RVec& hi, int n, unsigned seed);

}  // namespace cq
