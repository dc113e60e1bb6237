#include "varint/integrators.hpp"

#include <cmath>

namespace varint {

namespace {

constexpr std::size_t kMaxSteps = 5'000'000;

template <class Real>
Real checked_step(const Real& t_k, const Real& t_k1) {
  if (!(t_k1 > t_k))
    throw NonMonotoneTimeError("non-monotone time: t_k1 = " + format_scalar<Real>(t_k1, 6) +
                               " does not exceed t_k = " + format_scalar<Real>(t_k, 6));
  return t_k1 - t_k;
}

template <class Real>
void check_state(const LagrangianModel<Real>& model, const ExtendedState<Real>& s) {
  if (s.q.size() != model.dim() || s.p.size() != model.dim())
    throw ConfigError("state dimension does not match the model");
  if (!is_finite(s.t) || !is_finite(s.E) || !all_finite(s.q) || !all_finite(s.p))
    throw DomainError("state has a non-finite component");
}

template <class Real>
void check_run_args(const ExtendedState<Real>& state0, const Real& step, const Real& T_final, const char* step_name) {
  if (!(step > 0)) throw ConfigError(std::string(step_name) + " must be positive");
  if (!is_finite(T_final) || T_final < state0.t) throw ConfigError("T_final must not precede the initial time");
}

template <class Real>
void record_failure(Trajectory<Real>& traj, const Error& err) {
  traj.complete = false;
  traj.error = err.code();
  const ExtendedState<Real>& last = traj.states.back();
  traj.diagnosis = "step " + std::to_string(traj.states.size() - 1) + " at t=" + format_scalar<Real>(last.t, 10) +
                   ": " + err.what();
}

// Solves the momentum rows M Δq + (h²/2)∇V(q + Δq/2) - h p = 0 at fixed h.
template <class Real>
SolveReport<Real> solve_momentum(const LagrangianModel<Real>& model, const Vec<Real>& q, const Vec<Real>& p,
                                 const Real& h, const SolverConfig<Real>& cfg) {
  const Mat<Real>& M = model.mass();
  const Real hh2 = h * h / 2;
  const Real hh4 = h * h / 4;
  VectorFn<Real> F = [&](const Vec<Real>& d) -> Vec<Real> {
    return M * d + model.gradient(Vec<Real>(q + d / 2)) * hh2 - p * h;
  };
  MatrixFn<Real> J = [&](const Vec<Real>& d) -> Mat<Real> {
    return M + model.hessian(Vec<Real>(q + d / 2)) * hh4;
  };
  return newton_solve<Real>(F, Vec<Real>(model.inverse_mass() * p * h), cfg, J);
}

template <class Real>
StepRecord<Real> make_record(const Real& h, const SolveReport<Real>& rep) {
  StepRecord<Real> rec{h, rep.residual_norm, rep.iterations, std::nullopt, rep.condition_estimate,
                       rep.ill_conditioned, false};
  return rec;
}

}  // namespace

template <class Real>
Real discrete_lagrangian_midpoint(const LagrangianModel<Real>& model, const Real& t_k, const Vec<Real>& q_k,
                                  const Real& t_k1, const Vec<Real>& q_k1) {
  const Real h = checked_step(t_k, t_k1);
  const Vec<Real> v = (q_k1 - q_k) / h;
  const Vec<Real> qm = (q_k + q_k1) / 2;
  return h * model.lagrangian(qm, v);
}

template <class Real>
DiscretePartials<Real> discrete_partials_midpoint(const LagrangianModel<Real>& model, const Real& t_k,
                                                  const Vec<Real>& q_k, const Real& t_k1, const Vec<Real>& q_k1) {
  const Real h = checked_step(t_k, t_k1);
  const Vec<Real> v = (q_k1 - q_k) / h;
  const Vec<Real> qm = (q_k + q_k1) / 2;
  const Vec<Real> Mv = model.mass() * v;
  const Vec<Real> half_grad = model.gradient(qm) * (h / 2);
  const Real energy = v.dot(Mv) / 2 + model.potential(qm);
  return DiscretePartials<Real>{energy, -Mv - half_grad, -energy, Mv - half_grad};
}

template <class Real>
Vec<Real> epavi_residual(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Vec<Real>& x) {
  const int n = model.dim();
  if (x.size() != n + 1) throw ConfigError("EpAVI unknown vector has the wrong size");
  const Real& h = x[0];
  if (!(h > 0)) throw NonMonotoneTimeError("EpAVI residual requested at a non-positive step");
  const Vec<Real> d = x.tail(n);
  const Vec<Real> v = d / h;
  const Vec<Real> qm = state.q + d / 2;
  Vec<Real> r(n + 1);
  r.head(n) = model.mass() * d + model.gradient(qm) * (h * h / 2) - state.p * h;
  r[n] = v.dot(model.mass() * v) / 2 + model.potential(qm) - state.E;
  return r;
}

template <class Real>
Mat<Real> epavi_jacobian(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Vec<Real>& x) {
  const int n = model.dim();
  if (x.size() != n + 1) throw ConfigError("EpAVI unknown vector has the wrong size");
  const Real& h = x[0];
  if (!(h > 0)) throw NonMonotoneTimeError("EpAVI Jacobian requested at a non-positive step");
  const Vec<Real> d = x.tail(n);
  const Vec<Real> v = d / h;
  const Vec<Real> qm = state.q + d / 2;
  const Vec<Real> grad = model.gradient(qm);
  const Vec<Real> Mv = model.mass() * v;
  Mat<Real> J(n + 1, n + 1);
  J.block(0, 0, n, 1) = grad * h - state.p;
  J.block(0, 1, n, n) = model.mass() + model.hessian(qm) * (h * h / 4);
  J(n, 0) = -v.dot(Mv) / h;
  J.block(n, 1, 1, n) = (Mv / h + grad / 2).transpose();
  return J;
}

template <class Real>
Real epavi_seed_energy(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Real& h0,
                       const SolverConfig<Real>& cfg) {
  check_state(model, state);
  if (!(h0 > 0)) throw ConfigError("h0 must be positive");
  const Vec<Real> d = solve_momentum(model, state.q, state.p, h0, cfg).solution;
  const Vec<Real> v = d / h0;
  return v.dot(model.mass() * v) / 2 + model.potential(Vec<Real>(state.q + d / 2));
}

template <class Real>
EpaviStep<Real> epavi_step(const LagrangianModel<Real>& model, const ExtendedState<Real>& state,
                           const Real& h_guess, const SolverConfig<Real>& cfg) {
  check_state(model, state);
  if (!(h_guess > 0)) throw ConfigError("h_guess must be positive");
  const int n = model.dim();

  Vec<Real> x0(n + 1);
  x0[0] = h_guess;
  try {
    SolverConfig<Real> pcfg = cfg;
    pcfg.max_iter = std::min(cfg.max_iter, 10);
    pcfg.refine = 0;
    x0.tail(n) = solve_momentum(model, state.q, state.p, h_guess, pcfg).solution;
  } catch (const Error&) {
    x0.tail(n) = model.inverse_mass() * state.p * h_guess;
  }

  VectorFn<Real> F = [&](const Vec<Real>& x) { return epavi_residual(model, state, x); };
  MatrixFn<Real> J = [&](const Vec<Real>& x) { return epavi_jacobian(model, state, x); };
  AcceptFn<Real> positive = [](const Vec<Real>& x) { return x[0] > 0; };
  const SolveReport<Real> rep = newton_solve<Real>(F, x0, cfg, J, positive);

  const Real h = rep.solution[0];
  const Vec<Real> d = rep.solution.tail(n);
  const Real t1 = state.t + h;
  checked_step(state.t, t1);
  // Explicit updates from the solved increments: re-deriving h and Δq from the
  // rounded endpoints would cost ulp(t)/h of relative accuracy in E_{k+1}.
  const Vec<Real> v = d / h;
  const Vec<Real> qm = state.q + d / 2;
  const Vec<Real> Mv = model.mass() * v;
  const Vec<Real> p1 = Mv - model.gradient(qm) * (h / 2);
  const Real E1 = v.dot(Mv) / 2 + model.potential(qm);
  return EpaviStep<Real>{ExtendedState<Real>{t1, Vec<Real>(state.q + d), p1, E1}, make_record(h, rep)};
}

template <class Real>
Trajectory<Real> epavi_run(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0, const Real& h0,
                           const Real& T_final, const SolverConfig<Real>& cfg) {
  check_state(model, state0);
  check_run_args(state0, h0, T_final, "h0");
  cfg.validate();
  Trajectory<Real> traj;
  traj.states.push_back(state0);
  try {
    traj.states.back().E = epavi_seed_energy(model, state0, h0, cfg);
  } catch (const Error& err) {
    record_failure(traj, err);
    return traj;
  }
  Real h = h0;
  while (traj.states.back().t < T_final) {
    if (traj.steps.size() >= kMaxSteps) {
      record_failure(traj, Error(ErrorCode::NonConvergence, "step limit reached before T_final"));
      break;
    }
    const ExtendedState<Real>& cur = traj.states.back();
    std::optional<EpaviStep<Real>> step;
    try {
      step = epavi_step(model, cur, h, cfg);
    } catch (const Error& first) {
      if (first.code() == ErrorCode::Config) throw;
      try {
        step = epavi_step(model, cur, Real(h / 2), cfg);
        step->record.retried = true;
      } catch (const Error& second) {
        record_failure(traj, second);
        break;
      }
    }
    h = step->record.h;
    traj.states.push_back(std::move(step->state));
    traj.steps.push_back(std::move(step->record));
  }
  return traj;
}

const char* to_string(MonitorKind kind) noexcept {
  switch (kind) {
    case MonitorKind::Arclength: return "g1";
    case MonitorKind::Kepler: return "g2";
    case MonitorKind::Unit: return "unit";
  }
  return "unknown";
}

namespace {

template <class Real>
Real arclength_radicand(const LagrangianModel<Real>& model, const Vec<Real>& q, const Real& H0, Vec<Real>* grad_out) {
  const Vec<Real> grad = model.gradient(q);
  const Vec<Real> Minv_grad = model.inverse_mass() * grad;
  if (grad_out) *grad_out = grad;
  return 2 * (H0 - model.potential(q)) + grad.dot(Minv_grad);
}

}  // namespace

template <class Real>
Real monitor_arclength(const LagrangianModel<Real>& model, const Vec<Real>& q, const Real& H0) {
  using std::sqrt;
  const Real s = arclength_radicand<Real>(model, q, H0, nullptr);
  if (!(s > 0)) throw DomainError("arclength monitor radicand is not positive");
  return Real(1) / sqrt(s);
}

template <class Real>
Real monitor_kepler(const Vec<Real>& q) {
  return q.squaredNorm();
}

template <class Real>
Real Monitor<Real>::value(const LagrangianModel<Real>& model, const Vec<Real>& q) const {
  switch (kind) {
    case MonitorKind::Arclength: return monitor_arclength(model, q, H0);
    case MonitorKind::Kepler: return monitor_kepler<Real>(q);
    case MonitorKind::Unit: return Real(1);
  }
  return Real(1);
}

template <class Real>
Vec<Real> Monitor<Real>::gradient(const LagrangianModel<Real>& model, const Vec<Real>& q) const {
  using std::sqrt;
  switch (kind) {
    case MonitorKind::Arclength: {
      Vec<Real> grad;
      const Real s = arclength_radicand<Real>(model, q, H0, &grad);
      if (!(s > 0)) throw DomainError("arclength monitor radicand is not positive");
      const Vec<Real> ds = -2 * grad + 2 * (model.hessian(q) * (model.inverse_mass() * grad));
      return ds * (Real(-1) / (2 * s * sqrt(s)));
    }
    case MonitorKind::Kepler: return q * Real(2);
    case MonitorKind::Unit: return Vec<Real>::Zero(q.size());
  }
  return Vec<Real>::Zero(q.size());
}

template <class Real>
AviStep<Real> avi_step(const LagrangianModel<Real>& model, const Monitor<Real>& monitor, const AviState<Real>& state,
                       const Real& pt, const Real& delta_a, const SolverConfig<Real>& cfg) {
  const int n = model.dim();
  if (!(delta_a > 0)) throw ConfigError("delta_a must be positive");
  if (state.q.size() != n || state.p.size() != n) throw ConfigError("state dimension does not match the model");
  if (!is_finite(pt)) throw ConfigError("p^t must be finite");
  const Mat<Real>& Minv = model.inverse_mass();
  const Vec<Real>& q0 = state.q;
  const Vec<Real>& p0 = state.p;

  auto positive_monitor = [&](const Vec<Real>& qa) {
    const Real g = monitor.value(model, qa);
    if (!(g > 0)) throw DomainError("monitor is not positive at the step midpoint");
    return g;
  };

  VectorFn<Real> F = [&](const Vec<Real>& x) -> Vec<Real> {
    const Vec<Real> qa = (q0 + x.head(n)) / 2;
    const Vec<Real> pa = (p0 + x.tail(n)) / 2;
    const Real g = positive_monitor(qa);
    Vec<Real> r(2 * n);
    r.head(n) = x.head(n) - q0 - Minv * pa * (delta_a * g);
    r.tail(n) = x.tail(n) - p0 + model.gradient(qa) * (delta_a * g);
    return r;
  };
  MatrixFn<Real> J = [&](const Vec<Real>& x) -> Mat<Real> {
    const Vec<Real> qa = (q0 + x.head(n)) / 2;
    const Vec<Real> pa = (p0 + x.tail(n)) / 2;
    const Real g = positive_monitor(qa);
    const Vec<Real> G = monitor.gradient(model, qa);
    const Real half = delta_a / 2;
    Mat<Real> Jm(2 * n, 2 * n);
    Jm.topLeftCorner(n, n) = Mat<Real>::Identity(n, n) - (Minv * pa) * G.transpose() * half;
    Jm.topRightCorner(n, n) = -Minv * (half * g);
    Jm.bottomLeftCorner(n, n) = (model.gradient(qa) * G.transpose() + model.hessian(qa) * g) * half;
    Jm.bottomRightCorner(n, n) = Mat<Real>::Identity(n, n);
    return Jm;
  };

  const Real g0 = positive_monitor(q0);
  Vec<Real> x0(2 * n);
  x0.head(n) = q0 + Minv * p0 * (delta_a * g0);
  x0.tail(n) = p0 - model.gradient(q0) * (delta_a * g0);
  const SolveReport<Real> rep = newton_solve<Real>(F, x0, cfg, J);

  const Vec<Real> q1 = rep.solution.head(n);
  const Vec<Real> p1 = rep.solution.tail(n);
  const Real qt1 = state.qt + delta_a * positive_monitor(Vec<Real>((q0 + q1) / 2));
  const Real h = checked_step(state.qt, qt1);
  StepRecord<Real> rec = make_record(h, rep);
  rec.delta_a = delta_a;
  return AviStep<Real>{AviState<Real>{q1, qt1, p1}, rec};
}

template <class Real>
Real avi_calibrate_delta_a(const LagrangianModel<Real>& model, const Monitor<Real>& monitor,
                           const ExtendedState<Real>& state0, const Real& h0, const SolverConfig<Real>& cfg) {
  using std::abs;
  check_state(model, state0);
  if (!(h0 > 0)) throw ConfigError("h0 must be positive");
  const Real g0 = monitor.value(model, state0.q);
  if (!(g0 > 0)) throw DomainError("monitor is not positive at the initial state");
  const AviState<Real> s0{state0.q, state0.t, state0.p};
  const Real pt = -model.hamiltonian(state0.q, state0.p);
  Real delta_a = h0 / g0;
  Real mismatch(1);
  for (int i = 0; i < 50; ++i) {
    const Real h = avi_step(model, monitor, s0, pt, delta_a, cfg).record.h;
    mismatch = abs(h - h0) / h0;
    if (mismatch <= Real(1e-12)) break;
    delta_a *= h0 / h;
  }
  if (!(mismatch <= Real(1e-2)))
    throw NonConvergenceError("delta_a calibration missed h0 by " + format_scalar<Real>(mismatch, 3),
                              {to_double(delta_a)}, to_double(mismatch));
  return delta_a;
}

template <class Real>
Trajectory<Real> avi_run(const LagrangianModel<Real>& model, const Monitor<Real>& monitor,
                         const ExtendedState<Real>& state0, const Real& delta_a, const Real& T_final,
                         const SolverConfig<Real>& cfg) {
  check_state(model, state0);
  check_run_args(state0, delta_a, T_final, "delta_a");
  cfg.validate();
  const Real pt = -model.hamiltonian(state0.q, state0.p);
  Trajectory<Real> traj;
  traj.states.push_back(ExtendedState<Real>{state0.t, state0.q, state0.p, -pt});
  AviState<Real> cur{state0.q, state0.t, state0.p};
  while (cur.qt < T_final) {
    if (traj.steps.size() >= kMaxSteps) {
      record_failure(traj, Error(ErrorCode::NonConvergence, "step limit reached before T_final"));
      break;
    }
    try {
      AviStep<Real> step = avi_step(model, monitor, cur, pt, delta_a, cfg);
      cur = step.state;
      traj.states.push_back(ExtendedState<Real>{cur.qt, cur.q, cur.p, model.hamiltonian(cur.q, cur.p)});
      traj.steps.push_back(std::move(step.record));
    } catch (const Error& err) {
      record_failure(traj, err);
      break;
    }
  }
  return traj;
}

template <class Real>
EpaviStep<Real> midpoint_fixed_step(const LagrangianModel<Real>& model, const ExtendedState<Real>& state,
                                    const Real& h, const SolverConfig<Real>& cfg) {
  check_state(model, state);
  if (!(h > 0)) throw ConfigError("step size must be positive");
  const SolveReport<Real> rep = solve_momentum(model, state.q, state.p, h, cfg);
  const Real t1 = state.t + h;
  checked_step(state.t, t1);
  const Vec<Real> q1 = state.q + rep.solution;
  const Vec<Real> v = rep.solution / h;
  const Vec<Real> p1 = model.mass() * v - model.gradient(Vec<Real>(state.q + rep.solution / 2)) * (h / 2);
  return EpaviStep<Real>{ExtendedState<Real>{t1, q1, p1, model.hamiltonian(q1, p1)}, make_record(h, rep)};
}

template <class Real>
Trajectory<Real> midpoint_fixed_run(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0,
                                    const Real& h, const Real& T_final, const SolverConfig<Real>& cfg) {
  check_state(model, state0);
  check_run_args(state0, h, T_final, "step size");
  cfg.validate();
  Trajectory<Real> traj;
  traj.states.push_back(ExtendedState<Real>{state0.t, state0.q, state0.p, model.hamiltonian(state0.q, state0.p)});
  while (traj.states.back().t < T_final) {
    if (traj.steps.size() >= kMaxSteps) {
      record_failure(traj, Error(ErrorCode::NonConvergence, "step limit reached before T_final"));
      break;
    }
    try {
      EpaviStep<Real> step = midpoint_fixed_step(model, traj.states.back(), h, cfg);
      traj.states.push_back(std::move(step.state));
      traj.steps.push_back(std::move(step.record));
    } catch (const Error& err) {
      record_failure(traj, err);
      break;
    }
  }
  return traj;
}

#define VARINT_INSTANTIATE(Real)                                                                                   \
  template Real discrete_lagrangian_midpoint<Real>(const LagrangianModel<Real>&, const Real&, const Vec<Real>&,    \
                                                   const Real&, const Vec<Real>&);                                 \
  template DiscretePartials<Real> discrete_partials_midpoint<Real>(const LagrangianModel<Real>&, const Real&,      \
                                                                   const Vec<Real>&, const Real&, const Vec<Real>&); \
  template Vec<Real> epavi_residual<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&,                \
                                          const Vec<Real>&);                                                       \
  template Mat<Real> epavi_jacobian<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&,                \
                                          const Vec<Real>&);                                                       \
  template Real epavi_seed_energy<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&, const Real&,     \
                                        const SolverConfig<Real>&);                                                \
  template EpaviStep<Real> epavi_step<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&, const Real&, \
                                            const SolverConfig<Real>&);                                            \
  template Trajectory<Real> epavi_run<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&, const Real&, \
                                            const Real&, const SolverConfig<Real>&);                               \
  template Real monitor_arclength<Real>(const LagrangianModel<Real>&, const Vec<Real>&, const Real&);              \
  template Real monitor_kepler<Real>(const Vec<Real>&);                                                            \
  template struct Monitor<Real>;                                                                                   \
  template AviStep<Real> avi_step<Real>(const LagrangianModel<Real>&, const Monitor<Real>&, const AviState<Real>&, \
                                        const Real&, const Real&, const SolverConfig<Real>&);                      \
  template Real avi_calibrate_delta_a<Real>(const LagrangianModel<Real>&, const Monitor<Real>&,                    \
                                            const ExtendedState<Real>&, const Real&, const SolverConfig<Real>&);   \
  template Trajectory<Real> avi_run<Real>(const LagrangianModel<Real>&, const Monitor<Real>&,                      \
                                          const ExtendedState<Real>&, const Real&, const Real&,                    \
                                          const SolverConfig<Real>&);                                              \
  template EpaviStep<Real> midpoint_fixed_step<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&,     \
                                                     const Real&, const SolverConfig<Real>&);                      \
  template Trajectory<Real> midpoint_fixed_run<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&,     \
                                                     const Real&, const Real&, const SolverConfig<Real>&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
