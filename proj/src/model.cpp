#include "fsl/model.hpp"

#include <cmath>
#include <limits>

#include "fsl/linalg.hpp"

namespace fsl {

void NondegenerateModel::validate() const {
  spec.validate();
  grid.validate();
  validate_drift(drift, grid, dim());
}

RateResult NondegenerateModel::rate() const {
  return compute_rate_lambda(spec.lambda[0], drift.L, grid.r0);
}

void DegenerateModel::validate() const {
  spec2.validate();
  grid.validate();
  // n1 = 0 collapses the system to the noisy block alone; the coupling
  // machinery then reduces to the fully forced case.
  const int d1 = n1(), d2 = n2();
  require_input(d1 >= 0, "degenerate model: n1 must be >= 0");
  require_input(A1.rows() == d1 && A1.cols() == d1,
                "degenerate model: A1 must be n1 x n1");
  require_input(B.rows() == d1 && B.cols() == d2,
                "degenerate model: B must be n1 x n2");
  require_input(A0.rows() == d1 && A0.cols() == d1,
                "degenerate model: A0 must be n1 x n1");
  require_input(delta >= 0, "degenerate model: delta must be nonnegative");
  require_input(int(sigma_inv.size()) == d2,
                "degenerate model: sigma_inv needs one entry per mode");
  for (int i = 0; i < d2; ++i) {
    require_input(spec2.s[i] > 0,
                  "degenerate model: noise must act on every mode");
    require_input(std::abs(spec2.s[i] * sigma_inv[i] - 1.0) <= 1e-12,
                  "degenerate model: sigma * sigma_inv must equal 1 to 1e-12");
  }
  validate_drift2(drift, grid, d1, d2);
}

double DegenerateModel::lambda_prime() const {
  return compute_lambda_prime(delta, drift.K1, drift.K2, linalg::op_norm(B));
}

double DegenerateModel::alpha_weight() const {
  return compute_alpha(delta, drift.K1, drift.K2, linalg::op_norm(B));
}

GapReport DegenerateModel::gap() const {
  return check_degenerate_gap(lambda_prime(), spec2.lambda[0], grid.r0);
}

B3Report check_B3(const DegenerateModel& model) {
  B3Report rep;
  if (model.n1() == 0) {  // no drift-only block: vacuously dissipative
    rep.sym_max = -std::numeric_limits<double>::infinity();
    rep.margin = std::numeric_limits<double>::infinity();
    rep.pass = true;
    return rep;
  }
  rep.sym_max = linalg::sym_max_eig(model.A1);
  rep.margin = (model.delta - model.spec2.lambda[0]) - rep.sym_max;
  rep.pass = rep.margin >= 0;
  return rep;
}

B4Report check_B4(const DegenerateModel& model,
                  const std::vector<double>& sample_times, double t_gram) {
  require_input(t_gram > 0, "B4: Gramian horizon must be positive");
  B4Report rep;
  if (model.n1() == 0) {  // empty commutation identity, empty Gramian
    rep.pass = true;
    rep.q_min_eig = std::numeric_limits<double>::infinity();
    rep.q_cond = 1;
    return rep;
  }
  const int d2 = model.n2();
  // scale for the residual tolerance: the largest factor magnitude seen
  double scale = std::max(1.0, model.B.cwiseAbs().maxCoeff());
  for (double t : sample_times) {
    require_input(t >= 0, "B4: sample times must be nonnegative");
    Eigen::VectorXd ea2(d2);
    for (int i = 0; i < d2; ++i) ea2[i] = std::exp(-model.spec2.lambda[i] * t);
    const linalg::Mat lhs = model.B * ea2.asDiagonal();
    const linalg::Mat rhs =
        linalg::expm(t * model.A1) * linalg::expm(t * model.A0) * model.B;
    scale = std::max({scale, lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
    rep.max_residual =
        std::max(rep.max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  rep.residual_scale = scale;

  const auto integrand = [&](double s) -> linalg::Mat {
    const linalg::Mat E = linalg::expm(s * model.A0);
    const linalg::Mat EB = E * model.B;
    return EB * EB.transpose();
  };
  const linalg::Mat Q = linalg::integrate_mat(integrand, 0.0, t_gram, 1e-10);
  rep.q_min_eig = linalg::sym_min_eig(Q);
  const double q_max = linalg::sym_max_eig(Q);
  rep.q_cond = rep.q_min_eig > 0 ? q_max / rep.q_min_eig
                                 : std::numeric_limits<double>::infinity();
  rep.pass = rep.max_residual <= 1e-8 * scale && rep.q_min_eig > 0;
  return rep;
}

}  // namespace fsl
