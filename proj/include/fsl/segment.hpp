#pragma once

// Segment state: the solution restricted to the trailing delay window
// [-r0, 0], sampled on m+1 uniform nodes theta_j = -r0 + j*dt with
// dt = r0/m.  Node m is the current value (theta = 0).  Stored as a
// ring so one step is O(dim), not O(m*dim).

#include <cmath>

#include <Eigen/Core>

#include "fsl/errors.hpp"

namespace fsl {

struct SegmentGrid {
  double r0 = 1;
  int m = 64;

  double dt() const { return r0 / m; }
  int nodes() const { return m + 1; }
  double theta(int j) const { return -r0 + j * dt(); }

  void validate() const {
    require_input(std::isfinite(r0) && r0 > 0, "segment grid: r0 must be > 0");
    require_input(m >= 1, "segment grid: m must be >= 1");
  }

  bool operator==(const SegmentGrid&) const = default;
};

class Segment {
 public:
  Segment(SegmentGrid grid, int dim)
      : grid_(grid), data_(Eigen::MatrixXd::Zero(grid.nodes(), dim)) {
    grid_.validate();
    require_input(dim >= 0, "segment: dim must be >= 0");
  }

  static Segment constant(SegmentGrid grid, const Eigen::VectorXd& v) {
    Segment s(grid, int(v.size()));
    s.data_.rowwise() = v.transpose();
    return s;
  }

  const SegmentGrid& grid() const { return grid_; }
  int dim() const { return int(data_.cols()); }

  // Value at node j, j = 0 (theta = -r0) .. m (theta = 0).
  Eigen::VectorXd at(int j) const { return data_.row(row(j)); }
  Eigen::VectorXd newest() const { return data_.row(head_); }

  void set_node(int j, const Eigen::VectorXd& v) { data_.row(row(j)) = v; }

  // Advance by one grid step: the oldest node drops off, v becomes
  // the theta = 0 value.
  void push(const Eigen::VectorXd& v) {
    head_ = (head_ + 1) % grid_.nodes();
    data_.row(head_) = v;
  }

  // sup over theta of the Euclidean norm of the coordinate vector.
  double sup_norm() const {
    double best = 0;
    for (int r = 0; r < int(data_.rows()); ++r)
      best = std::max(best, data_.row(r).norm());
    return best;
  }

  // sup over theta of |x(theta) - y(theta)|.
  static double sup_gap(const Segment& x, const Segment& y) {
    require_input(x.grid_ == y.grid_ && x.dim() == y.dim(),
                  "segment gap: incompatible segments");
    double best = 0;
    for (int j = 0; j < x.grid_.nodes(); ++j)
      best = std::max(best, (x.at(j) - y.at(j)).norm());
    return best;
  }

 private:
  int row(int j) const { return (head_ + 1 + j) % grid_.nodes(); }

  SegmentGrid grid_;
  Eigen::MatrixXd data_;  // rows are nodes in ring order
  int head_ = 0;          // row holding theta = 0; row head_+1 is theta = -r0
};

}  // namespace fsl
