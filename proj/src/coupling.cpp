#include "fsl/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsl/drift.hpp"
#include "fsl/parallel.hpp"
#include "fsl/rng.hpp"

namespace fsl {

namespace {

void require_matching(const Segment& s, const SegmentGrid& grid, int dim,
                      const char* what) {
  require_input(s.grid() == grid, std::string(what) + ": grid mismatch");
  require_input(s.dim() == dim, std::string(what) + ": dimension mismatch");
}

void maybe_record(CouplingRecord& rec, int record_every, int64_t k,
                  int64_t n_steps, double dt, double gx, double gy,
                  bool two_block) {
  if (record_every <= 0) return;
  if (k % record_every != 0 && k != n_steps) return;
  rec.t.push_back(double(k) * dt);
  rec.gap_x.push_back(gx);
  if (two_block) rec.gap_y.push_back(gy);
}

}  // namespace

CouplingRecord synchronous_couple(const NondegenerateModel& model,
                                  const Segment& xi, const Segment& eta,
                                  double T, uint64_t seed, uint32_t path,
                                  int record_every, double tol_disc) {
  model.validate();
  require_matching(xi, model.grid, model.dim(), "synchronous couple");
  require_matching(eta, model.grid, model.dim(), "synchronous couple");
  require_input(T >= 0, "synchronous couple: T must be nonnegative");

  const double dt = model.grid.dt();
  const int64_t n_steps = steps_for(T, model.grid);
  const StepCoeffs c = make_step_coeffs(model.spec, dt);
  if (tol_disc < 0) tol_disc = 10 * dt;

  CouplingRecord rec;
  rec.seed = seed;
  rec.path = path;
  rec.initial_gap_x = Segment::sup_gap(xi, eta);

  const RateResult rate = model.rate();
  const double l1 = model.spec.lambda[0];
  const bool check = rate.positive && rec.initial_gap_x > 0;
  rec.bound_checked = check;
  const double pref = std::exp(l1 * model.grid.r0) * rec.initial_gap_x;

  Segment a = xi, b = eta;
  rng::PathNoise noise(seed, path);
  Eigen::VectorXd z(model.dim());

  double gap = rec.initial_gap_x;
  maybe_record(rec, record_every, 0, n_steps, dt, gap, 0, false);
  if (check) rec.max_bound_ratio = gap / pref;

  for (int64_t k = 0; k < n_steps; ++k) {
    noise.normals(uint64_t(k), z);
    const Eigen::VectorXd ba = eval_drift(model.drift, a);
    const Eigen::VectorXd bb = eval_drift(model.drift, b);
    a.push(ou_step(a.newest(), c, ba, z));
    b.push(ou_step(b.newest(), c, bb, z));
    gap = Segment::sup_gap(a, b);
    maybe_record(rec, record_every, k + 1, n_steps, dt, gap, 0, false);
    if (check) {
      const double ratio = gap / (pref * std::exp(-rate.rate * double(k + 1) * dt));
      rec.max_bound_ratio = std::max(rec.max_bound_ratio, ratio);
    }
  }
  if (check)
    require_numeric(rec.max_bound_ratio <= 1 + tol_disc,
                    "synchronous couple: decay bound violated beyond the "
                    "discretisation slack");
  return rec;
}

CouplingRecord synchronous_couple(const DegenerateModel& model,
                                  const DegState& a0, const DegState& b0,
                                  double T, uint64_t seed, uint32_t path,
                                  int record_every) {
  model.validate();
  require_matching(a0.X, model.grid, model.n1(), "synchronous couple");
  require_matching(a0.Y, model.grid, model.n2(), "synchronous couple");
  require_matching(b0.X, model.grid, model.n1(), "synchronous couple");
  require_matching(b0.Y, model.grid, model.n2(), "synchronous couple");
  require_input(T >= 0, "synchronous couple: T must be nonnegative");

  const double dt = model.grid.dt();
  const int64_t n_steps = steps_for(T, model.grid);
  const DegStepper st = make_deg_stepper(model);

  CouplingRecord rec;
  rec.seed = seed;
  rec.path = path;
  rec.initial_gap_x = Segment::sup_gap(a0.X, b0.X);
  rec.initial_gap_y = Segment::sup_gap(a0.Y, b0.Y);

  DegState a = a0, b = b0;
  rng::PathNoise noise(seed, path);
  Eigen::VectorXd z(model.n2());

  maybe_record(rec, record_every, 0, n_steps, dt, rec.initial_gap_x,
               rec.initial_gap_y, true);
  for (int64_t k = 0; k < n_steps; ++k) {
    noise.normals(uint64_t(k), z);
    for (DegState* s : {&a, &b}) {
      const Eigen::VectorXd bd = eval_drift2(model.drift, s->X, s->Y);
      const Eigen::VectorXd y_old = s->Y.newest();
      const Eigen::VectorXd y_new = ou_step(y_old, st.yc, bd, z);
      const Eigen::VectorXd x_new =
          st.eA1 * s->X.newest() + st.F0 * y_old + st.F1 * (y_new - y_old);
      s->Y.push(y_new);
      s->X.push(x_new);
    }
    maybe_record(rec, record_every, k + 1, n_steps, dt,
                 Segment::sup_gap(a.X, b.X), Segment::sup_gap(a.Y, b.Y), true);
  }
  return rec;
}

linalg::Mat qtilde_matrix(const DegenerateModel& model, double T) {
  require_input(T > 0, "qtilde: T must be positive");
  const int n1 = model.n1();
  if (n1 == 0) return linalg::Mat::Zero(0, 0);
  const linalg::Mat BBt = model.B * model.B.transpose();
  linalg::Mat Q = linalg::integrate_mat(
      [&](double s) -> linalg::Mat {
        const linalg::Mat E = linalg::expm(s * model.A0);
        return s * (T - s) * E * BBt * E.transpose();
      },
      0, T, 1e-10);
  Q = ((Q + Q.transpose()) / 2).eval();
  linalg::spd_factor(Q, 1e12);  // singularity / conditioning guard
  return Q;
}

HarnackPlan build_plan(const DegenerateModel& model, const DegState& init,
                       const DegState& init_bar, double t0) {
  model.validate();
  require_matching(init.X, model.grid, model.n1(), "plan");
  require_matching(init.Y, model.grid, model.n2(), "plan");
  require_matching(init_bar.X, model.grid, model.n1(), "plan");
  require_matching(init_bar.Y, model.grid, model.n2(), "plan");
  require_input(t0 > model.grid.r0, "plan: t0 must exceed the delay span r0");

  HarnackPlan plan(init, init_bar);
  plan.t0 = t0;
  plan.dt = model.grid.dt();
  plan.n_steps = steps_for(t0, model.grid);
  plan.k_T = plan.n_steps - model.grid.m;
  require_input(plan.k_T >= 1, "plan: t0 - r0 must cover at least one step");
  plan.T = double(plan.k_T) * plan.dt;
  plan.dxi0 = init_bar.X.newest() - init.X.newest();
  plan.deta0 = init_bar.Y.newest() - init.Y.newest();

  const int n1 = model.n1();
  const int n2 = model.n2();
  const double T = plan.T;

  if (n1 > 0) {
    plan.qtilde = qtilde_matrix(model, T);
    const linalg::SpdFactor fac = linalg::spd_factor(plan.qtilde, 1e12);
    plan.qtilde_cond = fac.cond;
    const linalg::Mat J = linalg::integrate_mat(
        [&](double s) -> linalg::Mat {
          return ((T - s) / T) * linalg::expm(s * model.A0) * model.B;
        },
        0, T, 1e-10);
    plan.e_vec = -fac.solve(plan.dxi0 + J * plan.deta0);
  } else {
    plan.qtilde = linalg::Mat::Zero(0, 0);
    plan.qtilde_cond = 1;
    plan.e_vec = Eigen::VectorXd::Zero(0);
  }

  const Eigen::VectorXd lam2 =
      Eigen::Map<const Eigen::VectorXd>(model.spec2.lambda.data(), n2);
  const auto u_at = [&](double s) -> Eigen::VectorXd {
    const double frac = s < T ? (T - s) / T : 0.0;
    Eigen::VectorXd u = frac * plan.deta0;
    if (n1 > 0 && s < T)
      u += s * (T - s) *
           (model.B.transpose() *
            (linalg::expm(s * model.A0).transpose() * plan.e_vec));
    return u;
  };

  plan.h_nodes.resize(plan.n_steps + 1, n2);
  plan.u_nodes.resize(plan.n_steps + 1, n2);
  plan.delta_y.resize(plan.n_steps + 1, n2);
  plan.delta_x.resize(plan.n_steps + 1, n1);
  plan.gamma.resize(plan.n_steps, n2);

  const linalg::Mat E0_step = linalg::expm(plan.dt * model.A0);
  const linalg::Mat E1_step = linalg::expm(plan.dt * model.A1);
  linalg::Mat E0 = linalg::Mat::Identity(n1, n1);
  linalg::Mat E1 = linalg::Mat::Identity(n1, n1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n1);
  plan.delta_x.row(0) = plan.dxi0;

  for (int64_t k = 0; k <= plan.n_steps; ++k) {
    const double t = double(k) * plan.dt;
    const double tpos = k < plan.k_T ? T - t : 0.0;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n2);
    if (n1 > 0 && tpos > 0)
      h = t * tpos * (model.B.transpose() * (E0.transpose() * plan.e_vec));
    plan.h_nodes.row(k) = h;
    const double frac = k < plan.k_T ? double(plan.k_T - k) / double(plan.k_T) : 0.0;
    plan.u_nodes.row(k) = frac * plan.deta0 + h;
    plan.delta_y.row(k) =
        (-lam2.array() * t).exp() * plan.u_nodes.row(k).transpose().array();

    if (k == plan.n_steps) break;
    if (n1 > 0 && k < plan.k_T) {
      v += linalg::integrate_mat(
          [&](double s) -> linalg::Mat {
            return linalg::expm(s * model.A0) * (model.B * u_at(s));
          },
          t, t + plan.dt, 1e-10);
    }
    E0 = (E0 * E0_step).eval();
    E1 = (E1 * E1_step).eval();
    plan.delta_x.row(k + 1) = E1 * (plan.dxi0 + v);
  }

  for (int64_t k = 0; k < plan.n_steps; ++k) {
    plan.gamma.row(k) =
        (-lam2.array() * (double(k + 1) * plan.dt)).exp() *
        (plan.u_nodes.row(k + 1) - plan.u_nodes.row(k)).transpose().array();
  }

  for (int64_t k = plan.k_T; k <= plan.n_steps; ++k)
    plan.x_resid_after_T =
        std::max(plan.x_resid_after_T, plan.delta_x.row(k).norm());
  const double scale = plan.dxi0.norm() + plan.deta0.norm() + 1;
  const double eps = std::numeric_limits<double>::epsilon();
  require_numeric(
      plan.x_resid_after_T <= (1e-8 + 64 * eps * plan.qtilde_cond) * scale,
      "plan: steered X difference fails to vanish after t0 - r0");
  return plan;
}

RunPlanResult run_plan(const HarnackPlan& plan, const DegenerateModel& model,
                       uint64_t seed, uint32_t path, int record_every) {
  const DegStepper st = make_deg_stepper(model);
  CouplingRecord rec;
  rec.seed = seed;
  rec.path = path;
  rec.initial_gap_x = Segment::sup_gap(plan.init.X, plan.init_bar.X);
  rec.initial_gap_y = Segment::sup_gap(plan.init.Y, plan.init_bar.Y);

  DegState s = plan.init;
  DegState sb = plan.init_bar;
  rng::PathNoise noise(seed, path);
  Eigen::VectorXd z(model.n2());
  double stoch = 0, phi_sq = 0, resid = 0;

  maybe_record(rec, record_every, 0, plan.n_steps, plan.dt,
               rec.initial_gap_x, rec.initial_gap_y, true);
  for (int64_t k = 0; k < plan.n_steps; ++k) {
    noise.normals(uint64_t(k), z);
    const Eigen::VectorXd b = eval_drift2(model.drift, s.X, s.Y);
    const Eigen::VectorXd bb = eval_drift2(model.drift, sb.X, sb.Y);
    const Eigen::VectorXd gam = plan.gamma.row(k);

    const Eigen::VectorXd y_old = s.Y.newest();
    const Eigen::VectorXd yb_old = sb.Y.newest();
    const Eigen::VectorXd y_new = ou_step(y_old, st.yc, b, z);
    const Eigen::VectorXd yb_new = ou_step(yb_old, st.yc, b, z) + gam;

    const Eigen::VectorXd a =
        (st.yc.drift_w.array() * (b - bb).array() + gam.array()) /
        st.yc.noise_sd.array();
    stoch += a.dot(z);
    phi_sq += a.squaredNorm();

    const Eigen::VectorXd x_new =
        st.eA1 * s.X.newest() + st.F0 * y_old + st.F1 * (y_new - y_old);
    const Eigen::VectorXd xb_new =
        st.eA1 * sb.X.newest() + st.F0 * yb_old + st.F1 * (yb_new - yb_old);
    s.Y.push(y_new);
    s.X.push(x_new);
    sb.Y.push(yb_new);
    sb.X.push(xb_new);

    resid = std::max(
        resid, ((yb_new - y_new) - plan.delta_y.row(k + 1).transpose()).norm());
    if (record_every > 0)
      maybe_record(rec, record_every, k + 1, plan.n_steps, plan.dt,
                   Segment::sup_gap(s.X, sb.X), Segment::sup_gap(s.Y, sb.Y),
                   true);
  }

  const GirsanovRecord gr{-stoch - 0.5 * phi_sq, stoch, phi_sq, seed, path};
  const double gx = Segment::sup_gap(s.X, sb.X);
  const double gy = Segment::sup_gap(s.Y, sb.Y);
  return RunPlanResult{.coupling = std::move(rec),
                       .girsanov = gr,
                       .terminal = std::move(s),
                       .terminal_bar = std::move(sb),
                       .terminal_gap_x = gx,
                       .terminal_gap_y = gy,
                       .delta_y_resid = resid};
}

std::vector<HarnackFunctional> default_functional_bank() {
  return {
      {"one", [](const Segment&, const Segment&) { return 1.0; }},
      {"clip_sup_x",
       [](const Segment& x, const Segment&) {
         return std::min(1.0, x.sup_norm());
       }},
      {"tanh_sup_y",
       [](const Segment&, const Segment& y) { return std::tanh(y.sup_norm()); }},
      {"gauss_sup_x",
       [](const Segment& x, const Segment&) {
         const double s = x.sup_norm();
         return std::exp(-s * s);
       }},
      {"clip_abs_y0",
       [](const Segment&, const Segment& y) {
         return std::min(1.0, std::abs(y.newest()(0)));
       }},
  };
}

HarnackReport estimate_harnack(const DegenerateModel& model,
                               const DegState& init, const DegState& init_bar,
                               double t0,
                               const std::vector<HarnackFunctional>& bank,
                               int64_t M, uint64_t seed, int workers) {
  require_input(M > 0, "harnack: M must be positive");
  require_input(!bank.empty(), "harnack: functional bank must be nonempty");
  const HarnackPlan plan = build_plan(model, init, init_bar, t0);
  const size_t nb = bank.size();

  std::vector<double> logR(static_cast<size_t>(M)), phisq(static_cast<size_t>(M)),
      gapmax(static_cast<size_t>(M)), yresid(static_cast<size_t>(M));
  Eigen::MatrixXd fb(M, Eigen::Index(nb)), f0(M, Eigen::Index(nb));
  parallel_for(M, workers, [&](int64_t j) {
    const RunPlanResult r = run_plan(plan, model, seed, uint32_t(j));
    logR[size_t(j)] = r.girsanov.log_R;
    phisq[size_t(j)] = r.girsanov.phi_sq_integral;
    gapmax[size_t(j)] = std::max(r.terminal_gap_x, r.terminal_gap_y);
    yresid[size_t(j)] = r.delta_y_resid;
    for (size_t i = 0; i < nb; ++i) {
      fb(j, Eigen::Index(i)) = bank[i].f(r.terminal_bar.X, r.terminal_bar.Y);
      f0(j, Eigen::Index(i)) = bank[i].f(r.terminal.X, r.terminal.Y);
    }
  });

  HarnackReport rep;
  rep.M = M;
  rep.seed = seed;
  double sum_R = 0, sum_R2 = 0, sum_phi = 0;
  double max_log = -std::numeric_limits<double>::infinity();
  for (double l : logR) max_log = std::max(max_log, 2 * l);
  double lse = 0;
  for (int64_t j = 0; j < M; ++j) {
    const double R = std::exp(logR[size_t(j)]);
    sum_R += R;
    sum_R2 += R * R;
    sum_phi += phisq[size_t(j)];
    lse += std::exp(2 * logR[size_t(j)] - max_log);
    rep.max_terminal_gap = std::max(rep.max_terminal_gap, gapmax[size_t(j)]);
    rep.max_delta_y_resid = std::max(rep.max_delta_y_resid, yresid[size_t(j)]);
  }
  rep.plan_x_resid = plan.x_resid_after_T;
  rep.qtilde_cond = plan.qtilde_cond;
  rep.mean_R = sum_R / double(M);
  double var = 0;
  for (double l : logR) {
    const double d = std::exp(l) - rep.mean_R;
    var += d * d;
  }
  rep.se_R = M > 1 ? std::sqrt(var / double(M - 1) / double(M)) : 0;
  rep.mean_R2_plain = sum_R2 / double(M);
  rep.log_mean_R2 = max_log + std::log(lse) - std::log(double(M));
  rep.mean_phi_sq = sum_phi / double(M);

  const double gx = Segment::sup_gap(init.X, init_bar.X);
  const double gy = Segment::sup_gap(init.Y, init_bar.Y);
  rep.rho = model.alpha_weight() * gx + gy;
  rep.c_hat = rep.rho > 0 ? rep.log_mean_R2 / (rep.rho * rep.rho) : 0;
  rep.c_phi = gx * gx + gy * gy > 0 ? rep.mean_phi_sq / (gx * gx + gy * gy) : 0;

  for (size_t i = 0; i < nb; ++i) {
    double s_rf = 0, s_fb2 = 0, s_f02 = 0;
    for (int64_t j = 0; j < M; ++j) {
      const double R = std::exp(logR[size_t(j)]);
      s_rf += R * fb(j, Eigen::Index(i));
      s_fb2 += fb(j, Eigen::Index(i)) * fb(j, Eigen::Index(i));
      s_f02 += f0(j, Eigen::Index(i)) * f0(j, Eigen::Index(i));
    }
    HarnackBankRow row;
    row.name = bank[i].name;
    row.lhs = (s_rf / double(M)) * (s_rf / double(M));
    row.rhs = rep.mean_R2_plain * (s_fb2 / double(M));
    row.rhs_cross = rep.mean_R2_plain * (s_f02 / double(M));
    row.slack = row.rhs - row.lhs;
    rep.rows.push_back(row);
  }
  rep.log_R_paths = std::move(logR);
  rep.phi_sq_paths = std::move(phisq);
  return rep;
}

}  // namespace fsl
