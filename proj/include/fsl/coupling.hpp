#pragma once

// Couplings.
//
// Synchronous: two solutions driven by the identical noise stream.
// The noise cancels in the difference, which then obeys
//   |X_t - Xbar_t|_inf <= e^{l1 r0} e^{-lambda t} |xi - eta|_inf
// whenever the contraction rate lambda is positive.
//
// Change of measure, degenerate pair on [0, t0] with T = t0 - r0 > 0:
// the barred solution is steered so that, with d0 = bar minus base at
// theta = 0,
//   (Ybar - Y)(t) = e^{tA2} u(t),   u(t) = deta0 (T-t)^+/T + h(t),
//   (Xbar - X)(t) = e^{tA1} ( dxi0 + int_0^{t^T} e^{sA0} B u(s) ds ),
//   h(t)   = t (T-t)^+ B^T e^{tA0^T} e,
//   e      = -Qtilde^{-1} ( dxi0 + int_0^T ((T-s)/T) e^{sA0} B ds deta0 ),
//   Qtilde = int_0^T s(T-s) e^{sA0} B B^T e^{sA0^T} ds,
// so both differences vanish on [T, t0] and the time-t0 segments
// coincide.  Steering adds the drift psi(t) = e^{tA2} u'(t) to the
// barred Y equation; removing it by Girsanov gives the density
//   R = exp( -sum <a_k, z_k> - 1/2 sum |a_k|^2 ),
//   a_k = ( drift_w (b_k - bbar_k) + gamma_k ) / noise_sd,
// where gamma_i(k) = e^{-l_i t_{k+1}} (u_i(t_{k+1}) - u_i(t_k)) is the
// exact integral of psi against the OU step kernel.  The discrete
// Ybar - Y therefore matches e^{tA2} u(t) on the grid up to rounding,
// a_k is adapted, E[R] = 1 is an identity of the discrete scheme, and
// under the reweighted law the barred chain is exactly the plain
// scheme started from the barred data.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fsl/linalg.hpp"
#include "fsl/model.hpp"
#include "fsl/segment.hpp"
#include "fsl/simulate.hpp"

namespace fsl {

struct CouplingRecord {
  std::vector<double> t;
  std::vector<double> gap_x;  // segment sup-norm gaps
  std::vector<double> gap_y;  // empty for single-block models
  double initial_gap_x = 0;
  double initial_gap_y = 0;
  uint64_t seed = 0;
  uint32_t path = 0;
  // sup over recorded nodes of gap / (e^{l1 r0} e^{-lambda t} gap(0));
  // filled only when the rate is positive and the initial gap nonzero.
  double max_bound_ratio = 0;
  bool bound_checked = false;
};

// tol_disc < 0 selects the default 10*dt slack on the decay bound.
CouplingRecord synchronous_couple(const NondegenerateModel& model,
                                  const Segment& xi, const Segment& eta,
                                  double T, uint64_t seed, uint32_t path = 0,
                                  int record_every = 1, double tol_disc = -1);

CouplingRecord synchronous_couple(const DegenerateModel& model,
                                  const DegState& a, const DegState& b,
                                  double T, uint64_t seed, uint32_t path = 0,
                                  int record_every = 1);

// Qtilde_T; throws numerical_error when not positive definite or when
// the condition number exceeds 1e12 (the steering needs the inverse).
linalg::Mat qtilde_matrix(const DegenerateModel& model, double T);

struct HarnackPlan {
  HarnackPlan(DegState init0, DegState init_bar0)
      : init(std::move(init0)), init_bar(std::move(init_bar0)) {}

  double t0 = 0;
  double T = 0;   // t0 - r0, always a grid node
  double dt = 0;
  int64_t n_steps = 0;  // t0 / dt
  int64_t k_T = 0;      // T / dt

  DegState init;      // base pair
  DegState init_bar;  // barred pair
  Eigen::VectorXd dxi0, deta0;

  linalg::Mat qtilde;
  Eigen::VectorXd e_vec;    // steering vector, size n1
  Eigen::MatrixXd h_nodes;  // (n_steps+1) x n2
  Eigen::MatrixXd u_nodes;  // (n_steps+1) x n2
  Eigen::MatrixXd delta_y;  // (n_steps+1) x n2, e^{tA2} u(t)
  Eigen::MatrixXd delta_x;  // (n_steps+1) x n1, quadrature reference
  Eigen::MatrixXd gamma;    // n_steps x n2 correction increments

  double qtilde_cond = 0;
  double x_resid_after_T = 0;  // max_{t_k >= T} |delta_x(t_k)|
};

HarnackPlan build_plan(const DegenerateModel& model, const DegState& init,
                       const DegState& init_bar, double t0);

struct GirsanovRecord {
  double log_R = 0;
  double stoch_integral = 0;   // sum_k <a_k, z_k>
  double phi_sq_integral = 0;  // sum_k |a_k|^2
  uint64_t seed = 0;
  uint32_t path = 0;
};

struct RunPlanResult {
  CouplingRecord coupling;
  GirsanovRecord girsanov;
  DegState terminal;      // base pair at t0
  DegState terminal_bar;  // barred pair at t0
  double terminal_gap_x = 0;
  double terminal_gap_y = 0;
  // max over steps of |(ybar - y) - delta_y| (grid-exactness residual)
  double delta_y_resid = 0;
};

RunPlanResult run_plan(const HarnackPlan& plan, const DegenerateModel& model,
                       uint64_t seed, uint32_t path = 0, int record_every = 0);

// Bounded functionals of the terminal segment pair, values in [0, 1].
struct HarnackFunctional {
  std::string name;
  std::function<double(const Segment& x, const Segment& y)> f;
};
std::vector<HarnackFunctional> default_functional_bank();

struct HarnackBankRow {
  std::string name;
  double lhs = 0;        // (mean R f(barred terminal))^2
  double rhs = 0;        // mean(R^2) mean(f(barred terminal)^2)
  double rhs_cross = 0;  // mean(R^2) mean(f(base terminal)^2)
  double slack = 0;      // rhs - lhs, >= 0 up to rounding
};

struct HarnackReport {
  int64_t M = 0;
  double mean_R = 0;
  double se_R = 0;
  double mean_R2_plain = 0;   // may overflow to inf on heavy tails
  double log_mean_R2 = 0;     // log-sum-exp stabilised
  double rho = 0;             // alpha |dxi|_inf + |deta|_inf
  double c_hat = 0;           // log_mean_R2 / rho^2
  double mean_phi_sq = 0;
  double c_phi = 0;           // mean_phi_sq / (|dxi|_inf^2 + |deta|_inf^2)
  double max_terminal_gap = 0;
  double max_delta_y_resid = 0;  // worst drift of the realised Y gap off plan
  double plan_x_resid = 0;       // steered X gap left after t0 - r0
  double qtilde_cond = 0;
  std::vector<HarnackBankRow> rows;
  std::vector<double> log_R_paths;  // per-path, in path order
  std::vector<double> phi_sq_paths;
  uint64_t seed = 0;
};

HarnackReport estimate_harnack(const DegenerateModel& model,
                               const DegState& init, const DegState& init_bar,
                               double t0,
                               const std::vector<HarnackFunctional>& bank,
                               int64_t M, uint64_t seed, int workers = 1);

}  // namespace fsl
