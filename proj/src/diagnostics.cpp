#include "varint/diagnostics.hpp"

#include <cmath>

namespace varint {

template <class Real>
ErrorSeries<Real> energy_error_series(const Trajectory<Real>& traj) {
  using std::abs;
  ErrorSeries<Real> s;
  if (traj.states.empty()) throw ConfigError("energy error of an empty trajectory");
  const Real& E0 = traj.states.front().E;
  for (const auto& st : traj.states) {
    s.times.push_back(st.t);
    s.values.push_back(abs(st.E - E0));
  }
  return s;
}

template <class Real>
ErrorSeries<Real> hamiltonian_error_series(const LagrangianModel<Real>& model, const Trajectory<Real>& traj) {
  using std::abs;
  ErrorSeries<Real> s;
  if (traj.states.empty()) throw ConfigError("energy error of an empty trajectory");
  const Real H0 = model.hamiltonian(traj.states.front().q, traj.states.front().p);
  for (const auto& st : traj.states) {
    s.times.push_back(st.t);
    s.values.push_back(abs(model.hamiltonian(st.q, st.p) - H0));
  }
  return s;
}

template <class Real>
TelescopingCheck<Real> telescoping_bound_check(const Trajectory<Real>& traj) {
  using std::abs;
  using std::max;
  if (traj.states.size() < 2) throw ConfigError("telescoping bound needs at least two states");
  const Real& E0 = traj.states.front().E;
  TelescopingCheck<Real> c{Real(0), Real(0), Real(0), true};
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    c.max_defect = max(c.max_defect, Real(abs(traj.states[k].E - traj.states[k - 1].E)));
    c.lhs = abs(traj.states[k].E - E0);
    c.rhs = Real(static_cast<long>(k)) * c.max_defect;
    if (!(c.lhs <= c.rhs)) c.holds = false;
  }
  return c;
}

template <class Real>
std::vector<ErrorSeries<Real>> trajectory_error(const Trajectory<Real>& traj, const ReferenceSolution<Real>& reference) {
  using std::abs;
  const int n = reference.dim;
  std::vector<ErrorSeries<Real>> out(static_cast<std::size_t>(n));
  for (const auto& st : traj.states) {
    if (st.q.size() != n) throw ConfigError("trajectory and reference dimensions differ");
    const Vec<Real> y = reference.dense(st.t);
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)].times.push_back(st.t);
      out[static_cast<std::size_t>(i)].values.push_back(abs(st.q[i] - y[i]));
    }
  }
  return out;
}

template <class Real>
StepStats<Real> timestep_stats(const Trajectory<Real>& traj, const std::optional<Real>& h0) {
  using std::max;
  using std::min;
  if (traj.states.size() < 2) throw ConfigError("step statistics need at least two states");
  StepStats<Real> s;
  s.steps = traj.states.size() - 1;
  Real sum(0);
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Real h = traj.states[k + 1].t - traj.states[k].t;
    sum += h;
    if (k == 0) {
      s.max_h = h;
      s.min_h = h;
    } else {
      s.max_h = max(s.max_h, h);
      s.min_h = min(s.min_h, h);
    }
  }
  s.mean_h = sum / Real(static_cast<long>(s.steps));
  const Real base = h0 ? *h0 : Real(traj.states[1].t - traj.states[0].t);
  if (!(base > 0)) throw ConfigError("reference step h0 must be positive");
  s.mean_ratio = s.mean_h / base;
  s.max_ratio = s.max_h / base;
  s.min_ratio = s.min_h / base;
  return s;
}

template <class Real>
Real angular_momentum_drift(const Trajectory<Real>& traj) {
  using std::abs;
  using std::max;
  if (traj.states.empty()) throw ConfigError("angular momentum of an empty trajectory");
  const Real L0 = angular_momentum<Real>(traj.states.front().q, traj.states.front().p);
  Real worst(0);
  for (const auto& st : traj.states) worst = max(worst, Real(abs(angular_momentum<Real>(st.q, st.p) - L0)));
  return worst;
}

template <class Real>
Real series_max(const ErrorSeries<Real>& s) {
  using std::max;
  Real m(0);
  for (const Real& v : s.values) m = max(m, v);
  return m;
}

#define VARINT_INSTANTIATE(Real)                                                                                  \
  template ErrorSeries<Real> energy_error_series<Real>(const Trajectory<Real>&);                                 \
  template ErrorSeries<Real> hamiltonian_error_series<Real>(const LagrangianModel<Real>&, const Trajectory<Real>&); \
  template TelescopingCheck<Real> telescoping_bound_check<Real>(const Trajectory<Real>&);                         \
  template std::vector<ErrorSeries<Real>> trajectory_error<Real>(const Trajectory<Real>&,                          \
                                                                 const ReferenceSolution<Real>&);                  \
  template StepStats<Real> timestep_stats<Real>(const Trajectory<Real>&, const std::optional<Real>&);             \
  template Real angular_momentum_drift<Real>(const Trajectory<Real>&);                                            \
  template Real series_max<Real>(const ErrorSeries<Real>&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
