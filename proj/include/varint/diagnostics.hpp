#pragma once

#include "varint/reference.hpp"

#include <optional>
#include <vector>

namespace varint {

template <class Real>
struct ErrorSeries {
  std::vector<Real> times;
  std::vector<Real> values;
};

template <class Real>
struct TelescopingCheck {
  Real lhs;         // |E_N - E_0|
  Real rhs;         // N max_i |E_i - E_{i-1}|
  Real max_defect;  // max_i |E_i - E_{i-1}|
  bool holds = true;  // lhs_k <= rhs_k at every k
};

template <class Real>
struct StepStats {
  std::size_t steps = 0;
  Real mean_h;
  Real max_h;
  Real min_h;
  Real mean_ratio;
  Real max_ratio;
  Real min_ratio;
};

/// |E_k - E_0| for every state, using the E carried by the trajectory.
template <class Real>
ErrorSeries<Real> energy_error_series(const Trajectory<Real>& traj);

/// |H(q_k, p_k) - H(q_0, p_0)|.
template <class Real>
ErrorSeries<Real> hamiltonian_error_series(const LagrangianModel<Real>& model, const Trajectory<Real>& traj);

/// ConfigError for fewer than two states.
template <class Real>
TelescopingCheck<Real> telescoping_bound_check(const Trajectory<Real>& traj);

/// Per-coordinate |q^i_k - q^i_ref(t_k)|; DomainError when a state lies outside
/// the reference span.
template <class Real>
std::vector<ErrorSeries<Real>> trajectory_error(const Trajectory<Real>& traj, const ReferenceSolution<Real>& reference);

/// Statistics of h_k = t_{k+1} - t_k. Ratios are taken against h0, which
/// defaults to the first step. ConfigError for fewer than two states.
template <class Real>
StepStats<Real> timestep_stats(const Trajectory<Real>& traj, const std::optional<Real>& h0 = std::nullopt);

/// max_k |Lz(q_k, p_k) - Lz(q_0, p_0)| for planar trajectories.
template <class Real>
Real angular_momentum_drift(const Trajectory<Real>& traj);

template <class Real>
Real series_max(const ErrorSeries<Real>& s);

}  // namespace varint
