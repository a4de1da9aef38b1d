#pragma once

#include <functional>

#include <Eigen/Dense>

#include "fsl/errors.hpp"

namespace fsl::linalg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Matrix exponential: scaling-and-squaring with Padé order fixed at 13
// and a fast path for exactly diagonal input.
Mat expm(const Mat& A);

// e^Z together with phi1(Z) = (e^Z - I) Z^-1 and
// phi2(Z) = (e^Z - I - Z) Z^-2, computed from one augmented
// exponential so the small-norm limit needs no series branch.
struct Phi12 {
  Mat e;
  Mat phi1;
  Mat phi2;
};
Phi12 expm_phi12(const Mat& Z);

// Adaptive 15-node Gauss-Legendre on [a,b]; bisects until the
// two-panel refinement agrees to rel_tol.  Throws numerical_error if
// the recursion depth limit is hit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol);
Mat integrate_mat(const std::function<Mat(double)>& f, double a, double b,
                  double rel_tol);

// Golden-section maximiser for a unimodal f on [a,b]; returns argmax
// located to +-tol.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol);

// Eigen bounds of the symmetric part (A + A^T)/2.
double sym_max_eig(const Mat& A);
double sym_min_eig(const Mat& A);

// Largest singular value.
double op_norm(const Mat& A);

// SPD factorisation with a condition-number guard; throws
// numerical_error when the matrix is not positive definite or when
// max_eig/min_eig exceeds max_cond.
struct SpdFactor {
  Eigen::LLT<Mat> llt;
  double min_eig = 0;
  double max_eig = 0;
  double cond = 0;

  Vec solve(const Vec& b) const { return llt.solve(b); }
};
SpdFactor spd_factor(const Mat& Q, double max_cond);

}  // namespace fsl::linalg
