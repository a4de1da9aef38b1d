#pragma once

// Time stepping.
//
// Noisy spectral components advance by the exact Ornstein-Uhlenbeck
// transition with the drift frozen over the step:
//   x_i <- e^{-l dt} x_i + (1 - e^{-l dt})/l * b_i
//          + s_i sqrt((1 - e^{-2 l dt})/(2l)) * z_i ,
// with the series branch below l*dt = 1e-8.
//
// The degenerate X block has no noise; it advances by an exponential
// integrator that is exact in e^{A1 dt} and second order in the
// B*Y(t) inhomogeneity (phi1/phi2 weights on the linear-in-time
// interpolant of Y).

#include <vector>

#include "fsl/linalg.hpp"
#include "fsl/model.hpp"
#include "fsl/rng.hpp"
#include "fsl/segment.hpp"

namespace fsl {

struct StepCoeffs {
  Eigen::VectorXd decay;    // e^{-lambda dt}
  Eigen::VectorXd drift_w;  // (1 - e^{-lambda dt}) / lambda
  Eigen::VectorXd noise_sd; // s sqrt((1 - e^{-2 lambda dt})/(2 lambda))
  double dt = 0;
};
StepCoeffs make_step_coeffs(const SpectralData& spec, double dt);

// One exact-OU step of the newest node; b and z sized to the segment.
Eigen::VectorXd ou_step(const Eigen::VectorXd& x, const StepCoeffs& c,
                        const Eigen::VectorXd& b, const Eigen::VectorXd& z);

struct SimOptions {
  int record_every = 1;    // record sup-norm every k-th step (0 = none)
  uint64_t step0 = 0;      // noise step origin; lets runs share increments
};

struct PathRecord {
  std::vector<double> t;
  std::vector<double> sup;  // segment sup-norm at the recorded times
  Segment terminal;
};

PathRecord simulate_nondegenerate(const NondegenerateModel& model,
                                  const Segment& init, double T,
                                  const rng::PathNoise& noise,
                                  const SimOptions& opts = {});

// Degenerate pair state.
struct DegState {
  Segment X;
  Segment Y;
};

struct DegStepper {
  linalg::Mat eA1;  // e^{A1 dt}
  linalg::Mat F0;   // dt phi1(dt A1) B
  linalg::Mat F1;   // dt phi2(dt A1) B
  StepCoeffs yc;
};
DegStepper make_deg_stepper(const DegenerateModel& model);

struct PathRecord2 {
  std::vector<double> t;
  std::vector<double> sup_x, sup_y;
  DegState terminal;
};

PathRecord2 simulate_degenerate(const DegenerateModel& model,
                                const DegState& init, double T,
                                const rng::PathNoise& noise,
                                const SimOptions& opts = {});

// Stochastic convolution Z(t) = int_0^t e^{(t-s)A} sigma dW(s), started
// from zero; returns the sup of |Z| over the window [t0-r0, t0]
// (values before time zero are zero).  One value per path.
double stoch_conv_window_sup(const SpectralData& spec, double t0,
                             const SegmentGrid& grid,
                             const rng::PathNoise& noise);

// Number of steps for a horizon T on the model grid; T must be
// grid-aligned to 1e-9 relative.
int64_t steps_for(double T, const SegmentGrid& grid);

}  // namespace fsl
