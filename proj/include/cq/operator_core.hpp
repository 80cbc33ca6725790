#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cq {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

enum class RepKind { Fock, Grid };
enum class GridDerivative { Spectral, Central4 };

struct HilbertRep {
  RepKind kind = RepKind::Fock;
  int dim = 1;
  double hbar = 1.0;
  double x_min = 0.0;
  double x_max = 0.0;
  bool operator==(const HilbertRep&) const = default;
};

struct Operator {
  HilbertRep rep;
  Mat m;
};

struct FockOps {
  HilbertRep rep;
  Mat a, a_dagger, s1, s2, number_op;
};

struct GridOps {
  HilbertRep rep;
  GridDerivative method;
  RVec points;
  Mat position, momentum;
};

inline constexpr int kMaxFockDim = 256;
inline constexpr int kMaxGridDim = 2048;

FockOps fock_rep(int dim, double hbar);
GridOps grid_rep(int dim, double hbar, double x_min, double x_max,
                 GridDerivative method = GridDerivative::Spectral);

Mat commutator(const Mat& a, const Mat& b);
Operator commutator(const Operator& a, const Operator& b);

// Frobenius norm of the leading k x k block (k = rows if k <= 0).
double block_norm(const Mat& m, int k);
// Frobenius norm restricted to rows/cols in `keep`.
double masked_norm(const Mat& m, const std::vector<int>& keep);

// Coefficients of q^m p^n keyed by (m, n).
using Polynomial = std::map<std::pair<int, int>, cplx>;
inline constexpr int kMaxWeylDegree = 12;

int poly_degree(const Polynomial& p);
// d^i/dq^i d^j/dp^j evaluated at (q, p).
cplx poly_derivative(const Polynomial& p, int i, int j, double q, double p_val);
// Polynomial in (s_q, s_p) obtained from H(q + c*s_q, p + c*s_p), expanded
// around the point (q, p).
Polynomial poly_shift(const Polynomial& p, double q, double p_val, double c);

// Full symmetrization of each monomial over orderings of Q and P factors.
Mat weyl_quantize(const Polynomial& poly, const Mat& q_op, const Mat& p_op);

// f applied to the eigenvalues of an operator diagonal in the number basis.
// Arguments below `domain_min` raise SpectralDomainError unless `clamp`
// maps them onto domain_min. Values within 1e-12 of the bound are snapped.
Mat spectral_fn(const Mat& diag_op, const std::function<double(double)>& f,
                double domain_min = -std::numeric_limits<double>::infinity(),
                bool clamp = false);
Mat spectral_sqrt(const Mat& diag_op, bool clamp = false);

using HBarFamily = std::function<Mat(double)>;
// 2 hbar dF/dhbar by a central difference with relative step delta.
Mat grading_derivative(const HBarFamily& family, double hbar0, double rel_step = 1e-4);

bool is_hermitian(const Mat& m, double tol = 1e-12);

}  // namespace cq
