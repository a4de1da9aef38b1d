#include "fsl/linalg.hpp"

#include <cmath>

namespace fsl::linalg {

namespace {

bool exactly_diagonal(const Mat& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

// Padé-13 numerator/denominator coefficients (Higham).
constexpr double kB[] = {64764752532480000.0, 32382376266240000.0,
                         7771770303897600.0,  1187353796428800.0,
                         129060195264000.0,   10559470521600.0,
                         670442572800.0,      33522128640.0,
                         1323241920.0,        40840800.0,
                         960960.0,            16380.0,
                         182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Mat expm(const Mat& A) {
  require_input(A.rows() == A.cols(), "expm: matrix must be square");
  const Eigen::Index n = A.rows();
  if (n == 0) return Mat(0, 0);
  require_numeric(A.allFinite(), "expm: non-finite entries");

  if (exactly_diagonal(A)) {
    Mat E = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) E(i, i) = std::exp(A(i, i));
    return E;
  }

  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > kTheta13) s = int(std::ceil(std::log2(norm1 / kTheta13)));
  const Mat As = A / std::ldexp(1.0, s);

  const Mat I = Mat::Identity(n, n);
  const Mat A2 = As * As;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat U =
      As * (A6 * (kB[13] * A6 + kB[11] * A4 + kB[9] * A2) + kB[7] * A6 +
            kB[5] * A4 + kB[3] * A2 + kB[1] * I);
  const Mat V = A6 * (kB[12] * A6 + kB[10] * A4 + kB[8] * A2) + kB[6] * A6 +
                kB[4] * A4 + kB[2] * A2 + kB[0] * I;

  Mat E = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

Phi12 expm_phi12(const Mat& Z) {
  require_input(Z.rows() == Z.cols(), "expm_phi12: matrix must be square");
  const Eigen::Index n = Z.rows();
  // exp([[Z,I,0],[0,0,I],[0,0,0]]) = [[e^Z, phi1, phi2], [0,I,I], [0,0,I]]
  Mat W = Mat::Zero(3 * n, 3 * n);
  W.topLeftCorner(n, n) = Z;
  W.block(0, n, n, n) = Mat::Identity(n, n);
  W.block(n, 2 * n, n, n) = Mat::Identity(n, n);
  const Mat E = expm(W);
  return {E.topLeftCorner(n, n), E.block(0, n, n, n), E.block(0, 2 * n, n, n)};
}

namespace {

// 15-node Gauss-Legendre abscissae/weights on [-1,1].
constexpr double kGlX[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGlW[15] = {
    0.03075324199611727, 0.07036604748810812, 0.1071592204671719,
    0.1395706779261543,  0.1662692058169939,  0.1861610000155622,
    0.1984314853271116,  0.2025782419255613,  0.1984314853271116,
    0.1861610000155622,  0.1662692058169939,  0.1395706779261543,
    0.1071592204671719,  0.07036604748810812, 0.03075324199611727};

template <class T, class Norm>
T gl15(const std::function<T(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T acc = kGlW[0] * f(c + h * kGlX[0]);
  for (int i = 1; i < 15; ++i) acc += kGlW[i] * f(c + h * kGlX[i]);
  return h * acc;
}

template <class T, class Norm>
T adaptive(const std::function<T(double)>& f, double a, double b,
           double rel_tol, const T& whole, Norm norm, int depth) {
  require_numeric(depth < 48, "integrate: refinement did not converge");
  const double mid = 0.5 * (a + b);
  const T left = gl15<T, Norm>(f, a, mid);
  const T right = gl15<T, Norm>(f, mid, b);
  const T both = left + right;
  const double err = norm(both - whole);
  if (err <= rel_tol * std::max(norm(both), 1e-300)) return both;
  return adaptive<T, Norm>(f, a, mid, rel_tol, left, norm, depth + 1) +
         adaptive<T, Norm>(f, mid, b, rel_tol, right, norm, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  require_input(std::isfinite(a) && std::isfinite(b), "integrate: finite limits");
  if (a == b) return 0.0;
  const auto norm = [](double x) { return std::abs(x); };
  return adaptive<double>(f, a, b, rel_tol, gl15<double, decltype(norm)>(f, a, b),
                          norm, 0);
}

Mat integrate_mat(const std::function<Mat(double)>& f, double a, double b,
                  double rel_tol) {
  require_input(std::isfinite(a) && std::isfinite(b),
                "integrate_mat: finite limits");
  const auto norm = [](const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  };
  if (a == b) {
    Mat z = f(a);
    z.setZero();
    return z;
  }
  return adaptive<Mat>(f, a, b, rel_tol, gl15<Mat, decltype(norm)>(f, a, b),
                       norm, 0);
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  require_input(b > a && tol > 0, "golden_max: need b > a and tol > 0");
  constexpr double invphi = 0.6180339887498949;   // (sqrt(5)-1)/2
  constexpr double invphi2 = 0.3819660112501051;  // 1 - invphi
  double x1 = a + invphi2 * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + invphi2 * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double sym_max_eig(const Mat& A) {
  require_input(A.rows() == A.cols(), "sym_max_eig: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double sym_min_eig(const Mat& A) {
  require_input(A.rows() == A.cols(), "sym_min_eig: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double op_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

SpdFactor spd_factor(const Mat& Q, double max_cond) {
  require_input(Q.rows() == Q.cols(), "spd_factor: matrix must be square");
  const Mat S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  SpdFactor out;
  out.min_eig = es.eigenvalues().minCoeff();
  out.max_eig = es.eigenvalues().maxCoeff();
  require_numeric(out.min_eig > 0, "spd_factor: matrix is not positive definite");
  out.cond = out.max_eig / out.min_eig;
  require_numeric(out.cond <= max_cond,
                  "spd_factor: condition number exceeds guard");
  out.llt.compute(S);
  require_numeric(out.llt.info() == Eigen::Success,
                  "spd_factor: Cholesky factorisation failed");
  return out;
}

}  // namespace fsl::linalg
