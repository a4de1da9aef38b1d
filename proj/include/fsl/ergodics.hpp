#pragma once

// Long-run statistics: contraction-rate fitting against the analytic
// rate, exponential-moment tables, the time-shift coupling bound on
// W(mu_t1, mu_t2), and invariant-measure sampling.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fsl/coupling.hpp"
#include "fsl/model.hpp"

namespace fsl {

struct ContractionFit {
  double fitted_rate = 0;   // decay rate; positive means contraction
  double r_squared = 0;
  double theoretical_rate = 0;
  double relative_gap = 0;  // (fitted - theoretical) / theoretical
  bool floor_hit = false;   // points at the log floor were dropped
  int points_used = 0;
};

// Least-squares slope of log(mean gap) vs t over [t_min, end].  For
// two-block records the fitted series is alpha*gap_x + gap_y.
ContractionFit fit_contraction_rate(const std::vector<CouplingRecord>& records,
                                    double t_min, double theoretical_rate,
                                    double alpha = 0);

struct ConcentrationTable {
  std::vector<double> eps;
  std::vector<double> t;
  Eigen::MatrixXd mean;  // t rows, eps columns: mean exp(eps sup^2)
  Eigen::MatrixXd se;
  std::vector<std::vector<bool>> overflow;  // flagged cells assert nothing
  int64_t M = 0;
  uint64_t seed = 0;
};

// Paths start from the zero segment; sup is the segment sup-norm at
// each requested time.
ConcentrationTable estimate_concentration(const NondegenerateModel& model,
                                          const std::vector<double>& eps_grid,
                                          const std::vector<double>& t_grid,
                                          int64_t M, uint64_t seed,
                                          int workers = 1);

struct WassersteinEstimate {
  double t1 = 0, t2 = 0;
  double mean_gap = 0;
  double se = 0;
  int64_t M = 0;
  uint64_t seed = 0;
};

// Couples the laws at t1 and t2 from the same initial segment: the
// long run covers [0, t2], the short one starts at t2 - t1 and shares
// the noise increments on the overlap.  The mean terminal gap
// upper-bounds W(mu_t1, mu_t2); the degenerate variant uses the
// weighted metric alpha |dX|_inf + |dY|_inf.
WassersteinEstimate w_cauchy_gap(const NondegenerateModel& model,
                                 const Segment& xi, double t1, double t2,
                                 int64_t M, uint64_t seed, int workers = 1);
WassersteinEstimate w_cauchy_gap(const DegenerateModel& model,
                                 const DegState& init, double t1, double t2,
                                 int64_t M, uint64_t seed, int workers = 1);

struct InvariantSummary {
  int64_t M = 0;
  double burn_in = 0;
  double sup_mean = 0, sup_var = 0;
  Eigen::VectorXd coord_mean;  // theta = 0 coordinates across samples
  Eigen::VectorXd coord_var;
  double eps = 0;
  double exp_moment = 0, exp_moment_se = 0;
  bool exp_overflow = false;
  uint64_t seed = 0;
};

// M terminal segments after the burn-in horizon, one independent path
// each, started from zero.  burn_in <= 0 selects the default
// 10/lambda, which requires a positive contraction rate.
InvariantSummary sample_invariant(const NondegenerateModel& model,
                                  double burn_in, int64_t M, double eps,
                                  uint64_t seed, int workers = 1);

}  // namespace fsl
