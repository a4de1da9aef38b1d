#include "fsl/drift.hpp"

#include <cmath>

#include "fsl/linalg.hpp"

namespace fsl {

int resolve_delay_node(double tau, const SegmentGrid& grid) {
  require_input(tau >= 0 && tau <= grid.r0 + 1e-12 * grid.r0,
                "drift: delay must lie in [0, r0]");
  const double j = tau / grid.dt();
  const double jr = std::round(j);
  require_input(std::abs(j - jr) <= 1e-9 * std::max(1.0, j),
                "drift: delay must be grid-aligned (tau = j*dt)");
  return int(jr);
}

Eigen::VectorXd eval_drift(const DriftSpec& drift, const Segment& seg) {
  const int m = seg.grid().m;
  return std::visit(
      [&](const auto& f) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroDrift>) {
          return Eigen::VectorXd::Zero(seg.dim());
        } else if constexpr (std::is_same_v<T, DiscreteDelayDrift>) {
          Eigen::VectorXd b = f.offset;
          for (size_t k = 0; k < f.delay_nodes.size(); ++k)
            b += f.coeff[k] * seg.at(m - f.delay_nodes[k]);
          return b;
        } else if constexpr (std::is_same_v<T, DistributedDelayDrift>) {
          Eigen::VectorXd acc = Eigen::VectorXd::Zero(seg.dim());
          for (size_t k = 0; k < f.atom_nodes.size(); ++k)
            acc += f.weights[k] * seg.at(m - f.atom_nodes[k]);
          return f.gain * acc;
        } else {
          double best = f.weight.row(0).dot(seg.at(0));
          for (int j = 1; j <= m; ++j)
            best = std::max(best, f.weight.row(j).dot(seg.at(j)));
          return best * f.direction;
        }
      },
      drift.form);
}

double drift_lipschitz_bound(const DriftSpec& drift) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroDrift>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DiscreteDelayDrift>) {
          double acc = 0;
          for (const auto& c : f.coeff) acc += linalg::op_norm(c);
          return acc;
        } else if constexpr (std::is_same_v<T, DistributedDelayDrift>) {
          double tv = 0;
          for (double w : f.weights) tv += std::abs(w);
          return f.gain * tv;
        } else {
          double wmax = 0;
          for (int j = 0; j < int(f.weight.rows()); ++j)
            wmax = std::max(wmax, f.weight.row(j).norm());
          return wmax * f.direction.norm();
        }
      },
      drift.form);
}

void validate_drift(const DriftSpec& drift, const SegmentGrid& grid, int dim) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, DiscreteDelayDrift>) {
          require_input(f.delay_nodes.size() == f.coeff.size(),
                        "drift: one coefficient matrix per delay");
          require_input(f.offset.size() == dim, "drift: offset dim mismatch");
          for (int d : f.delay_nodes)
            require_input(d >= 0 && d <= grid.m, "drift: delay node out of range");
          for (const auto& c : f.coeff)
            require_input(c.rows() == dim && c.cols() == dim,
                          "drift: coefficient matrix dim mismatch");
        } else if constexpr (std::is_same_v<T, DistributedDelayDrift>) {
          require_input(f.atom_nodes.size() == f.weights.size(),
                        "drift: one weight per atom");
          double tv = 0;
          for (double w : f.weights) tv += std::abs(w);
          require_input(tv <= 1.0 + 1e-12,
                        "drift: atom weights must have total variation <= 1");
          require_input(f.gain >= 0, "drift: gain must be nonnegative");
          for (int d : f.atom_nodes)
            require_input(d >= 0 && d <= grid.m, "drift: atom node out of range");
        } else if constexpr (std::is_same_v<T, SupFormDrift>) {
          require_input(f.weight.rows() == grid.nodes() && f.weight.cols() == dim,
                        "drift: weight must be nodes x dim");
          require_input(f.direction.size() == dim,
                        "drift: direction dim mismatch");
          require_input(std::abs(f.direction.norm() - 1.0) <= 1e-9,
                        "drift: direction must be a unit vector");
        }
      },
      drift.form);
  const double bound = drift_lipschitz_bound(drift);
  require_input(drift.L + 1e-12 >= bound,
                "drift: declared Lipschitz constant below computable bound");
}

Eigen::VectorXd eval_drift2(const DriftSpec2& drift, const Segment& x,
                            const Segment& y) {
  const int mx = x.grid().m, my = y.grid().m;
  return std::visit(
      [&](const auto& f) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Zero2Drift>) {
          return Eigen::VectorXd::Zero(y.dim());
        } else if constexpr (std::is_same_v<T, Linear2Drift>) {
          return f.C1 * x.at(mx - f.d1) + f.C2 * y.at(my - f.d2) + f.offset;
        } else {
          return f.C1 * x.at(mx - f.d1).array().tanh().matrix() +
                 f.C2 * y.at(my - f.d2).array().tanh().matrix();
        }
      },
      drift.form);
}

std::pair<double, double> drift2_lipschitz_bound(const DriftSpec2& drift) {
  return std::visit(
      [&](const auto& f) -> std::pair<double, double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Zero2Drift>) {
          return {0.0, 0.0};
        } else {
          // tanh is 1-Lipschitz componentwise, so both forms share the
          // operator-norm bound.
          return {linalg::op_norm(f.C1), linalg::op_norm(f.C2)};
        }
      },
      drift.form);
}

void validate_drift2(const DriftSpec2& drift, const SegmentGrid& grid, int n1,
                     int n2) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (!std::is_same_v<T, Zero2Drift>) {
          require_input(f.C1.rows() == n2 && f.C1.cols() == n1,
                        "drift2: C1 must be n2 x n1");
          require_input(f.C2.rows() == n2 && f.C2.cols() == n2,
                        "drift2: C2 must be n2 x n2");
          require_input(f.d1 >= 0 && f.d1 <= grid.m && f.d2 >= 0 && f.d2 <= grid.m,
                        "drift2: delay node out of range");
          if constexpr (std::is_same_v<T, Linear2Drift>)
            require_input(f.offset.size() == n2, "drift2: offset dim mismatch");
        }
      },
      drift.form);
  const auto [k1, k2] = drift2_lipschitz_bound(drift);
  require_input(drift.K1 + 1e-12 >= k1 && drift.K2 + 1e-12 >= k2,
                "drift2: declared constants below computable bounds");
}

}  // namespace fsl
