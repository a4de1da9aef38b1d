#pragma once

// Model descriptions.
//
// Non-degenerate: dX = {A X + b(X_t)} dt + sigma dW in spectral
// coordinates (A e_i = -lambda_i e_i, s_i = |sigma* e_i|); every mode
// is forced.
//
// Degenerate: dX = {A1 X + B Y} dt (no noise),
//             dY = {A2 Y + b(X_t, Y_t)} dt + sigma dW,
// with A2 diagonal in spectral coordinates and the auxiliary
// commutation generator A0 tying B to the two semigroups via
// B e^{tA2} = e^{tA1} e^{tA0} B.

#include <vector>

#include <Eigen/Dense>

#include "fsl/drift.hpp"
#include "fsl/segment.hpp"
#include "fsl/spectral_model.hpp"

namespace fsl {

struct NondegenerateModel {
  SpectralData spec;
  SegmentGrid grid;     // delay span r0, m subdivisions
  DriftSpec drift;

  int dim() const { return spec.n_modes(); }
  void validate() const;

  // Contraction rate sup(s - L e^{s r0}) from the declared L.
  RateResult rate() const;
};

struct DegenerateModel {
  Eigen::MatrixXd A1;             // n1 x n1
  Eigen::MatrixXd B;              // n1 x n2
  Eigen::MatrixXd A0;             // n1 x n1
  SpectralData spec2;             // spectrum of -A2 plus noise coefficients
  std::vector<double> sigma_inv;  // per-mode inverse noise coefficients
  double delta = 0;               // dissipativity margin in the A1 bound
  SegmentGrid grid;
  DriftSpec2 drift;

  int n1() const { return int(A1.rows()); }
  int n2() const { return spec2.n_modes(); }
  void validate() const;  // includes sigma*sigma_inv = 1 to 1e-12

  double lambda_prime() const;
  double alpha_weight() const;
  GapReport gap() const;
};

// sym(A1) max eigenvalue <= delta - lambda1(A2).
struct B3Report {
  bool pass = false;
  double sym_max = 0;
  double margin = 0;  // (delta - lambda1) - sym_max, >= 0 on pass
};
B3Report check_B3(const DegenerateModel& model);

// Commutation residual max_t |B e^{tA2} - e^{tA1} e^{tA0} B| over the
// sample times, plus positivity of the controllability Gramian
// Q_t = int_0^t e^{sA0} B B* e^{sA0*} ds at t_gram.
struct B4Report {
  bool pass = false;
  double max_residual = 0;
  double residual_scale = 1;
  double q_min_eig = 0;
  double q_cond = 0;
};
B4Report check_B4(const DegenerateModel& model,
                  const std::vector<double>& sample_times, double t_gram);

}  // namespace fsl
