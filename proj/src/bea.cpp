#include "varint/bea.hpp"

#include <cmath>

namespace varint {

namespace {

template <class Real>
void require_1d(const LagrangianModel<Real>& model) {
  if (model.dim() != 1) throw UnsupportedOrderError("modified equations are implemented for 1-DOF models only");
}

template <class Real>
void require_positive_dt(const Real& dt) {
  if (!(dt > 0)) throw ConfigError("invalid jet: t' must be positive");
}

template <class Real>
Vec<Real> scalar_vec(const Real& x) {
  Vec<Real> v(1);
  v[0] = x;
  return v;
}

}  // namespace

template <class Real>
void Jet1D<Real>::validate() const {
  require_positive_dt(dt);
  if (!(delta_a >= 0)) throw ConfigError("invalid jet: delta_a must be non-negative");
}

template <class Real>
TimeProfile<Real>::TimeProfile(Real scale, Real c) : scale_(std::move(scale)), c_(std::move(c)) {
  using std::abs;
  if (!(scale_ > 0) || !(abs(c_) < scale_)) throw ConfigError("time profile t(a) = s a + c sin a needs |c| < s");
}

template <class Real>
Real TimeProfile<Real>::t(const Real& a) const {
  using std::sin;
  return scale_ * a + c_ * sin(a);
}

template <class Real>
Real TimeProfile<Real>::dt(const Real& a) const {
  using std::cos;
  return scale_ + c_ * cos(a);
}

template <class Real>
Real TimeProfile<Real>::ddt(const Real& a) const {
  using std::sin;
  return -c_ * sin(a);
}

template <class Real>
Real TimeProfile<Real>::dddt(const Real& a) const {
  using std::cos;
  return -c_ * cos(a);
}

template <class Real>
ResidualPair<Real> discrete_residual(const LagrangianModel<Real>& model, const Real& t_prev, const Vec<Real>& q_prev,
                                     const Real& t0, const Vec<Real>& q0, const Real& t_next, const Vec<Real>& q_next,
                                     const Real& delta_a) {
  if (!(delta_a > 0)) throw ConfigError("delta_a must be positive");
  const DiscretePartials<Real> prev = discrete_partials_midpoint(model, t_prev, q_prev, t0, q0);
  const DiscretePartials<Real> next = discrete_partials_midpoint(model, t0, q0, t_next, q_next);
  return ResidualPair<Real>{prev.D4 + next.D2, prev.D3 + next.D1};
}

template <class Real>
Real modified_rhs_order2(const LagrangianModel<Real>& model, const Jet1D<Real>& jet) {
  require_1d(model);
  jet.validate();
  const Vec<Real> q = scalar_vec(jet.q);
  const Real m = model.scalar_mass();
  const Real Vq = model.gradient(q)[0];
  Real rhs = jet.dq * jet.ddt / jet.dt - jet.dt * jet.dt * Vq / m;
  if (jet.delta_a != 0) {
    const Real Vqq = model.hessian(q)(0, 0);
    const Real Vqqq = model.third_derivative(q);
    const Real dt2 = jet.dt * jet.dt;
    rhs += jet.delta_a * jet.delta_a / (24 * m) *
           (4 * dt2 * dt2 * Vq * Vqq / m - 4 * jet.dq * jet.dt * jet.ddt * Vqq - jet.dq * jet.dq * dt2 * Vqqq);
  }
  return rhs;
}

template <class Real>
Real modified_lagrangian_mod3(const LagrangianModel<Real>& model, const Real& q, const Real& dq, const Real& dt,
                              const Real& delta_a) {
  require_1d(model);
  require_positive_dt(dt);
  const Vec<Real> qv = scalar_vec(q);
  const Real m = model.scalar_mass();
  const Real v = dq / dt;
  const Real Vq = model.gradient(qv)[0];
  const Real Vqq = model.hessian(qv)(0, 0);
  return dt * (m * v * v / 2 - model.potential(qv)) +
         delta_a * delta_a / 24 * (dt * dt * dt * Vq * Vq / m + dq * dq * dt * Vqq);
}

template <class Real>
Real meshed_lagrangian_order2(const LagrangianModel<Real>& model, const MeshedJet<Real>& jet) {
  require_1d(model);
  require_positive_dt(jet.dt);
  const Vec<Real> qv = scalar_vec(jet.q);
  const Real m = model.scalar_mass();
  const Real& dq = jet.dq;
  const Real& ddq = jet.ddq;
  const Real& dt = jet.dt;
  const Real& ddt = jet.ddt;
  const Real Vq = model.gradient(qv)[0];
  const Real Vqq = model.hessian(qv)(0, 0);
  const Real v = dq / dt;
  const Real correction = -m * ddq * ddq / dt + 2 * m * dq * ddq * ddt / (dt * dt) -
                          m * dq * dq * ddt * ddt / (dt * dt * dt) + 2 * dq * ddt * Vq + dq * dq * dt * Vqq -
                          2 * ddq * dt * Vq;
  return dt * (m * v * v / 2 - model.potential(qv)) + jet.delta_a * jet.delta_a / 24 * correction;
}

template <class Real>
Real loglog_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
  using std::log;
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
  Real sx(0), sy(0), sxx(0), sxy(0);
  const Real n(static_cast<long>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("log-log fit needs positive data");
    const Real lx = log(x[i]);
    const Real ly = log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const Real denom = n * sxx - sx * sx;
  if (!(denom > 0)) throw DomainError("log-log fit needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

template <class Real>
OrderEstimate<Real> residual_order_estimate(const LagrangianModel<Real>& model, const TimeProfile<Real>& profile,
                                            bool use_modified, const std::vector<Real>& delta_a_list,
                                            const OrderOptions<Real>& options) {
  using std::abs;
  using std::max;
  require_1d(model);
  if (delta_a_list.size() < 4) throw ConfigError("order estimate needs at least four step sizes");
  for (std::size_t i = 0; i < delta_a_list.size(); ++i) {
    if (!(delta_a_list[i] > 0)) throw ConfigError("step sizes must be positive");
    if (i > 0 && !(delta_a_list[i] < delta_a_list[i - 1])) throw ConfigError("step sizes must be decreasing");
  }
  if (options.samples < 1) throw ConfigError("order estimate needs at least one sample point");
  if (!(options.window > 4 * delta_a_list.front())) throw ConfigError("window too short for the largest step");

  OrderEstimate<Real> est;
  Real ratio(0), speed(0);
  for (const Real& da : delta_a_list) {
    const Real jet_da = use_modified ? da : Real(0);
    OdeRhs<Real> f = [&](const Real& a, const Vec<Real>& y) -> Vec<Real> {
      Jet1D<Real> jet{y[0], y[1], profile.dt(a), profile.ddt(a), profile.dddt(a), jet_da};
      Vec<Real> dy(2);
      dy << y[1], modified_rhs_order2(model, jet);
      return dy;
    };
    Vec<Real> y0(2);
    y0 << options.q0, options.dq0;
    const DenseSolution<Real> sol = dopri5_solve<Real>(f, Real(0), y0, options.window, options.reltol, options.abstol);

    const Real margin = 2 * da;
    Real worst_el(0), worst_e(0);
    for (int s = 0; s < options.samples; ++s) {
      const Real a = options.samples == 1
                         ? options.window / 2
                         : margin + (options.window - 2 * margin) * Real(s) / Real(options.samples - 1);
      const Vec<Real> ym = sol(Real(a - da));
      const Vec<Real> y = sol(a);
      const Vec<Real> yp = sol(Real(a + da));
      const ResidualPair<Real> psi =
          discrete_residual(model, profile.t(Real(a - da)), scalar_vec(ym[0]), profile.t(a), scalar_vec(y[0]),
                            profile.t(Real(a + da)), scalar_vec(yp[0]), da);
      const Real el = abs(psi.psi_EL[0]);
      const Real e = abs(psi.psi_E);
      worst_el = max(worst_el, el);
      worst_e = max(worst_e, e);
      if (el > 0) ratio = max(ratio, Real(e / el));
      speed = max(speed, Real(abs(y[1] / profile.dt(a))));
    }
    est.delta_a.push_back(da);
    est.residual_EL.push_back(worst_el);
    est.residual_E.push_back(worst_e);
  }
  est.slope = loglog_slope(est.delta_a, est.residual_EL);
  est.slope_E = loglog_slope(est.delta_a, est.residual_E);
  est.psi_ratio = speed > 0 ? Real(ratio / speed) : Real(0);
  return est;
}

template <class Real>
Real reparametrization_check(const LagrangianModel<Real>& model, const TimeProfile<Real>& profile,
                                    const ExtendedState<Real>& state0, const Real& T, const Real& reltol,
                                    const Real& abstol) {
  using std::abs;
  using std::max;
  const int n = model.dim();
  if (state0.q.size() != n || state0.p.size() != n) throw ConfigError("state dimension does not match the model");
  if (!(T > 0)) throw ConfigError("window length must be positive");

  OdeRhs<Real> f = [&](const Real& a, const Vec<Real>& y) -> Vec<Real> {
    const Real dt = profile.dt(a);
    Vec<Real> dy(2 * n);
    dy.head(n) = y.tail(n);
    dy.tail(n) = y.tail(n) * (profile.ddt(a) / dt) - model.inverse_mass() * model.gradient(Vec<Real>(y.head(n))) * (dt * dt);
    return dy;
  };
  Vec<Real> y0(2 * n);
  y0 << state0.q, model.inverse_mass() * state0.p * profile.dt(Real(0));
  const DenseSolution<Real> transformed = dopri5_solve<Real>(f, Real(0), y0, T, reltol, abstol);

  const Real t_origin = profile.t(Real(0));
  const Real span = profile.t(T) - t_origin;
  const ReferenceSolution<Real> physical = reference_solve(model, state0, Real(state0.t + span), reltol, abstol);

  auto deviation = [&](const Real& a) {
    Real t_phys = state0.t + (profile.t(a) - t_origin);
    if (t_phys > physical.dense.t_end()) t_phys = physical.dense.t_end();
    if (t_phys < physical.dense.t_begin()) t_phys = physical.dense.t_begin();
    const Vec<Real> qa = transformed(a).head(n);
    const Vec<Real> qp = physical.dense(t_phys).head(n);
    return inf_norm(Vec<Real>(qa - qp));
  };

  Real worst(0);
  for (const Real& a : transformed.times()) worst = max(worst, deviation(a));
  constexpr int kGrid = 200;
  for (int i = 0; i <= kGrid; ++i) worst = max(worst, deviation(Real(T * Real(i) / Real(kGrid))));
  return worst;
}

template <class Real>
FrequencyCheck<Real> modified_frequency_check(const Real& k, const Real& m, const std::vector<Real>& delta_a_list) {
  using std::abs;
  using std::atan;
  using std::sqrt;
  const LagrangianModel<Real> model = LagrangianModel<Real>::oscillator(k, m);
  const Real omega = sqrt(k / m);
  FrequencyCheck<Real> c;
  for (const Real& da : delta_a_list) {
    if (!(da > 0)) throw ConfigError("step sizes must be positive");
    const Jet1D<Real> jet{Real(1), Real(0), Real(1), Real(0), Real(0), da};
    const Real modified = -modified_rhs_order2(model, jet);
    const Real w = 2 / da * atan(omega * da / 2);
    c.delta_a.push_back(da);
    c.modified.push_back(modified);
    c.exact.push_back(w * w);
    c.difference.push_back(abs(modified - w * w));
  }
  c.slope = loglog_slope(c.delta_a, c.difference);
  return c;
}

#define VARINT_INSTANTIATE(Real)                                                                                   \
  template struct Jet1D<Real>;                                                                                     \
  template class TimeProfile<Real>;                                                                                \
  template ResidualPair<Real> discrete_residual<Real>(const LagrangianModel<Real>&, const Real&, const Vec<Real>&, \
                                                      const Real&, const Vec<Real>&, const Real&, const Vec<Real>&, \
                                                      const Real&);                                                \
  template Real modified_rhs_order2<Real>(const LagrangianModel<Real>&, const Jet1D<Real>&);                       \
  template Real modified_lagrangian_mod3<Real>(const LagrangianModel<Real>&, const Real&, const Real&, const Real&, \
                                               const Real&);                                                       \
  template Real meshed_lagrangian_order2<Real>(const LagrangianModel<Real>&, const MeshedJet<Real>&);              \
  template Real loglog_slope<Real>(const std::vector<Real>&, const std::vector<Real>&);                            \
  template FrequencyCheck<Real> modified_frequency_check<Real>(const Real&, const Real&, const std::vector<Real>&); \
  template OrderEstimate<Real> residual_order_estimate<Real>(const LagrangianModel<Real>&,                         \
                                                             const TimeProfile<Real>&, bool,                       \
                                                             const std::vector<Real>&, const OrderOptions<Real>&); \
  template Real reparametrization_check<Real>(const LagrangianModel<Real>&, const TimeProfile<Real>&,       \
                                                     const ExtendedState<Real>&, const Real&, const Real&,         \
                                                     const Real&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
