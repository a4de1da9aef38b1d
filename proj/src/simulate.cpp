#include "fsl/simulate.hpp"

#include <cmath>

namespace fsl {

StepCoeffs make_step_coeffs(const SpectralData& spec, double dt) {
  require_input(dt > 0, "step coeffs: dt must be positive");
  const int n = spec.n_modes();
  StepCoeffs c;
  c.dt = dt;
  c.decay.resize(n);
  c.drift_w.resize(n);
  c.noise_sd.resize(n);
  for (int i = 0; i < n; ++i) {
    const double l = spec.lambda[i];
    const double u = l * dt;
    c.decay[i] = std::exp(-u);
    if (u < 1e-8) {
      // series: (1-e^-u)/l = dt(1 - u/2 + ...), var = dt(1 - u + ...)
      c.drift_w[i] = dt * (1.0 - 0.5 * u);
      c.noise_sd[i] = spec.s[i] * std::sqrt(dt * (1.0 - u));
    } else {
      c.drift_w[i] = -std::expm1(-u) / l;
      c.noise_sd[i] = spec.s[i] * std::sqrt(-std::expm1(-2.0 * u) / (2.0 * l));
    }
  }
  return c;
}

Eigen::VectorXd ou_step(const Eigen::VectorXd& x, const StepCoeffs& c,
                        const Eigen::VectorXd& b, const Eigen::VectorXd& z) {
  return (c.decay.array() * x.array() + c.drift_w.array() * b.array() +
          c.noise_sd.array() * z.array())
      .matrix();
}

int64_t steps_for(double T, const SegmentGrid& grid) {
  require_input(T >= 0, "horizon must be nonnegative");
  const double n = T / grid.dt();
  const double nr = std::round(n);
  require_input(std::abs(n - nr) <= 1e-9 * std::max(1.0, n),
                "horizon must be a multiple of the segment step dt = r0/m");
  return int64_t(nr);
}

PathRecord simulate_nondegenerate(const NondegenerateModel& model,
                                  const Segment& init, double T,
                                  const rng::PathNoise& noise,
                                  const SimOptions& opts) {
  require_input(init.grid() == model.grid && init.dim() == model.dim(),
                "simulate: initial segment does not match the model grid");
  const int64_t n = steps_for(T, model.grid);
  const double dt = model.grid.dt();
  const StepCoeffs coeffs = make_step_coeffs(model.spec, dt);

  PathRecord rec{{}, {}, init};
  Segment& seg = rec.terminal;
  Eigen::VectorXd z(model.dim());
  if (opts.record_every > 0) {
    rec.t.push_back(0.0);
    rec.sup.push_back(seg.sup_norm());
  }
  for (int64_t k = 0; k < n; ++k) {
    const Eigen::VectorXd b = eval_drift(model.drift, seg);
    noise.normals(opts.step0 + uint64_t(k), z);
    seg.push(ou_step(seg.newest(), coeffs, b, z));
    if (opts.record_every > 0 && (k + 1) % opts.record_every == 0) {
      rec.t.push_back(double(k + 1) * dt);
      rec.sup.push_back(seg.sup_norm());
    }
  }
  return rec;
}

DegStepper make_deg_stepper(const DegenerateModel& model) {
  const double dt = model.grid.dt();
  DegStepper st;
  const auto p = linalg::expm_phi12(dt * model.A1);
  st.eA1 = p.e;
  st.F0 = dt * p.phi1 * model.B;
  st.F1 = dt * p.phi2 * model.B;
  st.yc = make_step_coeffs(model.spec2, dt);
  return st;
}

PathRecord2 simulate_degenerate(const DegenerateModel& model,
                                const DegState& init, double T,
                                const rng::PathNoise& noise,
                                const SimOptions& opts) {
  require_input(init.X.grid() == model.grid && init.Y.grid() == model.grid,
                "simulate: initial segments must live on the model grid");
  require_input(init.X.dim() == model.n1() && init.Y.dim() == model.n2(),
                "simulate: initial segment dimensions mismatch");
  const int64_t n = steps_for(T, model.grid);
  const double dt = model.grid.dt();
  const DegStepper st = make_deg_stepper(model);

  PathRecord2 rec{{}, {}, {}, init};
  Segment& X = rec.terminal.X;
  Segment& Y = rec.terminal.Y;
  Eigen::VectorXd z(model.n2());
  if (opts.record_every > 0) {
    rec.t.push_back(0.0);
    rec.sup_x.push_back(X.sup_norm());
    rec.sup_y.push_back(Y.sup_norm());
  }
  for (int64_t k = 0; k < n; ++k) {
    const Eigen::VectorXd b = eval_drift2(model.drift, X, Y);
    noise.normals(opts.step0 + uint64_t(k), z);
    const Eigen::VectorXd y_old = Y.newest();
    const Eigen::VectorXd y_new = ou_step(y_old, st.yc, b, z);
    const Eigen::VectorXd x_new =
        st.eA1 * X.newest() + st.F0 * y_old + st.F1 * (y_new - y_old);
    Y.push(y_new);
    X.push(x_new);
    if (opts.record_every > 0 && (k + 1) % opts.record_every == 0) {
      rec.t.push_back(double(k + 1) * dt);
      rec.sup_x.push_back(X.sup_norm());
      rec.sup_y.push_back(Y.sup_norm());
    }
  }
  return rec;
}

double stoch_conv_window_sup(const SpectralData& spec, double t0,
                             const SegmentGrid& grid,
                             const rng::PathNoise& noise) {
  require_input(t0 >= 0, "stochastic convolution: t0 must be nonnegative");
  const int64_t n = steps_for(t0, grid);
  const StepCoeffs coeffs = make_step_coeffs(spec, grid.dt());
  Segment seg(grid, spec.n_modes());  // zero history = zero pre-time values
  Eigen::VectorXd z(spec.n_modes());
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(spec.n_modes());
  for (int64_t k = 0; k < n; ++k) {
    noise.normals(uint64_t(k), z);
    seg.push(ou_step(seg.newest(), coeffs, b, z));
  }
  return seg.sup_norm();
}

}  // namespace fsl
