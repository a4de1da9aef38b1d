#pragma once

// Drift functionals on segments.  Every form carries a declared
// Lipschitz constant and exposes a computable upper bound so the
// declaration can be audited: declared L >= bound is enforced at
// model build.
//
// Delays are grid-aligned: tau = j*dt, resolved to node offsets once.

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fsl/segment.hpp"

namespace fsl {

// b(xi) = sum_k C_k xi(-tau_k) + offset.  Bound: sum_k |C_k|_2.
struct DiscreteDelayDrift {
  std::vector<int> delay_nodes;          // tau_k = node * dt
  std::vector<Eigen::MatrixXd> coeff;    // one dim x dim matrix per delay
  Eigen::VectorXd offset;
};

// b(xi) = gain * sum_k w_k xi(theta_k), sum_k |w_k| <= 1.  Bound: gain * sum|w|.
struct DistributedDelayDrift {
  std::vector<int> atom_nodes;
  std::vector<double> weights;
  double gain = 0;
};

// b(xi) = sup_j <xi(theta_j), g(theta_j)> * direction.
// Bound: max_j |g(theta_j)|_2 * |direction|_2.
struct SupFormDrift {
  Eigen::MatrixXd weight;     // nodes x dim, row j = g(theta_j)
  Eigen::VectorXd direction;  // unit vector
};

struct ZeroDrift {};

struct DriftSpec {
  std::variant<ZeroDrift, DiscreteDelayDrift, DistributedDelayDrift,
               SupFormDrift>
      form;
  double L = 0;  // declared Lipschitz constant
};

Eigen::VectorXd eval_drift(const DriftSpec& drift, const Segment& seg);
double drift_lipschitz_bound(const DriftSpec& drift);
void validate_drift(const DriftSpec& drift, const SegmentGrid& grid, int dim);

// Two-argument drift b(xi, eta) for the degenerate system, mapping a
// pair of segments to the noisy component's space.  Declared constants
// K1 (against the first segment) and K2 (against the second).
struct Linear2Drift {
  Eigen::MatrixXd C1;  // n2 x n1
  int d1 = 0;          // node offset into the first segment
  Eigen::MatrixXd C2;  // n2 x n2
  int d2 = 0;
  Eigen::VectorXd offset;
};

// b = C1 tanh(xi(-tau1)) + C2 tanh(eta(-tau2)), tanh componentwise.
struct Tanh2Drift {
  Eigen::MatrixXd C1;
  int d1 = 0;
  Eigen::MatrixXd C2;
  int d2 = 0;
};

struct Zero2Drift {};

struct DriftSpec2 {
  std::variant<Zero2Drift, Linear2Drift, Tanh2Drift> form;
  double K1 = 0;
  double K2 = 0;
};

Eigen::VectorXd eval_drift2(const DriftSpec2& drift, const Segment& x,
                            const Segment& y);
// (bound on K1, bound on K2)
std::pair<double, double> drift2_lipschitz_bound(const DriftSpec2& drift);
void validate_drift2(const DriftSpec2& drift, const SegmentGrid& grid, int n1,
                     int n2);

// Maps a time lag tau >= 0 to its node offset, requiring grid alignment.
int resolve_delay_node(double tau, const SegmentGrid& grid);

}  // namespace fsl
