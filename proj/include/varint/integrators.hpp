#pragma once

// Extended-phase-space variational integrators built on the midpoint discrete
// Lagrangian L_d = h L((q_k + q_{k+1})/2, (q_{k+1} - q_k)/h), h = t_{k+1} - t_k.

#include "varint/errors.hpp"
#include "varint/models.hpp"
#include "varint/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varint {

template <class Real>
struct DiscretePartials {
  Real D1;       // dL_d/dt_k
  Vec<Real> D2;  // dL_d/dq_k
  Real D3;       // dL_d/dt_{k+1}
  Vec<Real> D4;  // dL_d/dq_{k+1}
};

template <class Real>
struct StepRecord {
  Real h;          // t_{k+1} - t_k
  Real residual;   // final Newton residual (inf-norm)
  int newton_iters = 0;
  std::optional<Real> delta_a;  // fictitious step (AVI only)
  Real condition;  // condition estimate of the final Jacobian
  bool ill_conditioned = false;
  bool retried = false;  // accepted after halving the step guess
};

template <class Real>
struct Trajectory {
  std::vector<ExtendedState<Real>> states;
  std::vector<StepRecord<Real>> steps;  // steps[k] takes states[k] to states[k+1]
  /// False when a step failed; states then hold the partial trajectory.
  bool complete = true;
  std::optional<ErrorCode> error;
  std::string diagnosis;
};

/// Throws NonMonotoneTimeError unless t_k1 > t_k.
template <class Real>
Real discrete_lagrangian_midpoint(const LagrangianModel<Real>& model, const Real& t_k, const Vec<Real>& q_k,
                                  const Real& t_k1, const Vec<Real>& q_k1);

/// Closed-form partials. With v = (q_k1 - q_k)/h and q_m the midpoint:
/// D1 = ½vᵀMv + V(q_m) = -D3, D2 = -Mv - (h/2)∇V(q_m), D4 = Mv - (h/2)∇V(q_m).
template <class Real>
DiscretePartials<Real> discrete_partials_midpoint(const LagrangianModel<Real>& model, const Real& t_k,
                                                  const Vec<Real>& q_k, const Real& t_k1, const Vec<Real>& q_k1);

// ---------------------------------------------------------------------------
// EpAVI

template <class Real>
struct EpaviStep {
  ExtendedState<Real> state;
  StepRecord<Real> record;
};

/// Residual of the implicit EpAVI pair in the increments x = (h, Δq):
/// rows 0..n-1 are h (-D2 L_d - p_k), row n is D1 L_d - E_k.
template <class Real>
Vec<Real> epavi_residual(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Vec<Real>& x);

/// Analytic Jacobian of epavi_residual with respect to (h, Δq).
template <class Real>
Mat<Real> epavi_jacobian(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Vec<Real>& x);

/// Discrete energy of the trajectory started at `state` with first step h0:
/// the momentum equation is solved at fixed h0 and D1 L_d is evaluated there.
/// Starting from E = H(q_0, p_0) instead makes h = 0 a double root of the
/// energy equation and the first steps degenerate.
template <class Real>
Real epavi_seed_energy(const LagrangianModel<Real>& model, const ExtendedState<Real>& state, const Real& h0,
                       const SolverConfig<Real>& cfg);

/// One step: solves -D2 L_d = p_k, D1 L_d = E_k for (t_{k+1}, q_{k+1}), then
/// p_{k+1} = D4 L_d and E_{k+1} = -D3 L_d. Newton starts from the fixed-step
/// momentum solution at h_guess and never accepts h <= 0.
template <class Real>
EpaviStep<Real> epavi_step(const LagrangianModel<Real>& model, const ExtendedState<Real>& state,
                           const Real& h_guess, const SolverConfig<Real>& cfg);

/// Steps until t >= T_final, feeding each accepted h back as the next guess.
/// state0.E is replaced by epavi_seed_energy(state0, h0). A failed step is
/// retried once from h_guess/2; a second failure ends the run with a partial
/// trajectory and a diagnosis.
template <class Real>
Trajectory<Real> epavi_run(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0, const Real& h0,
                           const Real& T_final, const SolverConfig<Real>& cfg);

// ---------------------------------------------------------------------------
// Monitor functions and AVI

enum class MonitorKind { Arclength, Kepler, Unit };

const char* to_string(MonitorKind kind) noexcept;

/// g1 = (2(H0 - V) + ∇VᵀM⁻¹∇V)^(-1/2); DomainError for a non-positive radicand.
template <class Real>
Real monitor_arclength(const LagrangianModel<Real>& model, const Vec<Real>& q, const Real& H0);

/// g2 = qᵀq.
template <class Real>
Real monitor_kepler(const Vec<Real>& q);

template <class Real>
struct Monitor {
  MonitorKind kind;
  Real H0;  // used by Arclength only

  Real value(const LagrangianModel<Real>& model, const Vec<Real>& q) const;
  Vec<Real> gradient(const LagrangianModel<Real>& model, const Vec<Real>& q) const;
};

/// Point of the transformed phase space; qt is the physical time.
template <class Real>
struct AviState {
  Vec<Real> q;
  Real qt;
  Vec<Real> p;
};

template <class Real>
struct AviStep {
  AviState<Real> state;
  StepRecord<Real> record;
};

/// Implicit midpoint on the transformed Hamiltonian g(q)(H(q, p) + p^t):
///   (q_{k+1} - q_k)/Δa = g(q_av) M⁻¹p_av
///   (p_{k+1} - p_k)/Δa = -g(q_av) ∇V(q_av)
///   (q^t_{k+1} - q^t_k)/Δa = g(q_av)
/// The terms carrying H + p^t vanish on the level set p^t = -H(q_0, p_0),
/// which the exact flow preserves, so `pt` only enters through the constraint.
template <class Real>
AviStep<Real> avi_step(const LagrangianModel<Real>& model, const Monitor<Real>& monitor, const AviState<Real>& state,
                       const Real& pt, const Real& delta_a, const SolverConfig<Real>& cfg);

/// Δa such that the first physical step equals h0: starts from h0/g(q_0) and
/// rescales by h0/h_realized until the relative mismatch is below 1e-10.
template <class Real>
Real avi_calibrate_delta_a(const LagrangianModel<Real>& model, const Monitor<Real>& monitor,
                           const ExtendedState<Real>& state0, const Real& h0, const SolverConfig<Real>& cfg);

/// Fixed-Δa AVI run until t >= T_final; E_k = H(q_k, p_k).
template <class Real>
Trajectory<Real> avi_run(const LagrangianModel<Real>& model, const Monitor<Real>& monitor,
                         const ExtendedState<Real>& state0, const Real& delta_a, const Real& T_final,
                         const SolverConfig<Real>& cfg);

// ---------------------------------------------------------------------------
// Fixed-step variational midpoint

/// Solves -D2 L_d = p_k at the given h, then p_{k+1} = D4 L_d; E = H(q, p).
template <class Real>
EpaviStep<Real> midpoint_fixed_step(const LagrangianModel<Real>& model, const ExtendedState<Real>& state,
                                    const Real& h, const SolverConfig<Real>& cfg);

template <class Real>
Trajectory<Real> midpoint_fixed_run(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0,
                                    const Real& h, const Real& T_final, const SolverConfig<Real>& cfg);

}  // namespace varint
