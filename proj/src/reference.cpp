#include "varint/reference.hpp"

#include <algorithm>
#include <cmath>

namespace varint {

namespace {

template <class Real>
Real rat(long long num, long long den) {
  return Real(num) / Real(den);
}

template <class Real>
Real rms_norm(const Vec<Real>& e, const Vec<Real>& scale) {
  using std::sqrt;
  Real s(0);
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const Real r = e[i] / scale[i];
    s += r * r;
  }
  return sqrt(s / Real(e.size()));
}

template <class Real>
Vec<Real> error_scale(const Vec<Real>& a, const Vec<Real>& b, const Real& rtol, const Real& atol) {
  Vec<Real> s(a.size());
  using std::abs;
  using std::max;
  for (Eigen::Index i = 0; i < a.size(); ++i) s[i] = atol + rtol * max(abs(a[i]), abs(b[i]));
  return s;
}

template <class Real>
Vec<Real> eval_rhs(const OdeRhs<Real>& f, const Real& t, const Vec<Real>& y) {
  Vec<Real> k = f(t, y);
  if (k.size() != y.size()) throw ConfigError("ODE right-hand side changed dimension");
  if (!all_finite(k)) throw DomainError("ODE right-hand side is not finite at t=" + format_scalar<Real>(t, 10));
  return k;
}

// Initial step guess from a first-order local error estimate.
template <class Real>
Real initial_step(const OdeRhs<Real>& f, const Real& t0, const Vec<Real>& y0, const Vec<Real>& f0,
                  const Real& rtol, const Real& atol) {
  using std::max;
  using std::min;
  using std::pow;
  const Vec<Real> sk = error_scale(y0, y0, rtol, atol);
  const Real d0 = rms_norm(y0, sk);
  const Real d1 = rms_norm(f0, sk);
  Real h0 = (d0 < Real(1e-5) || d1 < Real(1e-5)) ? Real(1e-6) : Real(0.01) * d0 / d1;
  const Vec<Real> y1 = y0 + f0 * h0;
  const Vec<Real> f1 = eval_rhs(f, Real(t0 + h0), y1);
  const Real d2 = rms_norm(Vec<Real>(f1 - f0), sk) / h0;
  const Real dm = max(d1, d2);
  const Real h1 = dm <= Real(1e-15) ? max(Real(1e-6), h0 * Real(1e-3)) : pow(Real(0.01) / dm, Real(0.2));
  return min(Real(100) * h0, h1);
}

}  // namespace

template <class Real>
Vec<Real> DenseSolution<Real>::operator()(const Real& t) const {
  if (t_.empty()) throw DomainError("empty dense solution");
  if (t < t_.front() || t > t_.back())
    throw DomainError("query time " + format_scalar<Real>(t, 10) + " outside the reference span [" +
                      format_scalar<Real>(t_.front(), 10) + ", " + format_scalar<Real>(t_.back(), 10) + "]");
  if (seg_.empty()) return y_.front();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(t_.begin(), it));
  i = i == 0 ? 0 : std::min(i - 1, seg_.size() - 1);
  const Segment& s = seg_[i];
  const Real theta = (t - t_[i]) / (t_[i + 1] - t_[i]);
  const Real theta1 = Real(1) - theta;
  return s.r1 + theta * (s.r2 + theta1 * (s.r3 + theta * (s.r4 + theta1 * s.r5)));
}

template <class Real>
DenseSolution<Real> dopri5_solve(const OdeRhs<Real>& f, const Real& t0, const Vec<Real>& y0, const Real& T,
                                 const Real& reltol, const Real& abstol) {
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  if (!(reltol > 0) || !(abstol > 0)) throw ConfigError("ODE tolerances must be positive");
  if (!(T >= t0)) throw ConfigError("ODE end time precedes the start time");
  if (!all_finite(y0)) throw DomainError("ODE initial value is not finite");

  const Real c2 = rat<Real>(1, 5), c3 = rat<Real>(3, 10), c4 = rat<Real>(4, 5), c5 = rat<Real>(8, 9);
  const Real a21 = rat<Real>(1, 5);
  const Real a31 = rat<Real>(3, 40), a32 = rat<Real>(9, 40);
  const Real a41 = rat<Real>(44, 45), a42 = rat<Real>(-56, 15), a43 = rat<Real>(32, 9);
  const Real a51 = rat<Real>(19372, 6561), a52 = rat<Real>(-25360, 2187), a53 = rat<Real>(64448, 6561),
             a54 = rat<Real>(-212, 729);
  const Real a61 = rat<Real>(9017, 3168), a62 = rat<Real>(-355, 33), a63 = rat<Real>(46732, 5247),
             a64 = rat<Real>(49, 176), a65 = rat<Real>(-5103, 18656);
  const Real a71 = rat<Real>(35, 384), a73 = rat<Real>(500, 1113), a74 = rat<Real>(125, 192),
             a75 = rat<Real>(-2187, 6784), a76 = rat<Real>(11, 84);
  const Real e1 = rat<Real>(71, 57600), e3 = rat<Real>(-71, 16695), e4 = rat<Real>(71, 1920),
             e5 = rat<Real>(-17253, 339200), e6 = rat<Real>(22, 525), e7 = rat<Real>(-1, 40);
  const Real d1 = rat<Real>(-12715105075LL, 11282082432LL), d3 = rat<Real>(87487479700LL, 32700410799LL),
             d4 = rat<Real>(-10690763975LL, 1880347072LL), d5 = rat<Real>(701980252875LL, 199316789632LL),
             d6 = rat<Real>(-1453857185LL, 822651844LL), d7 = rat<Real>(69997945LL, 29380423LL);

  DenseSolution<Real> sol;
  sol.t_.push_back(t0);
  sol.y_.push_back(y0);
  if (T == t0) return sol;

  Real t = t0;
  Vec<Real> y = y0;
  Vec<Real> k1 = eval_rhs(f, t, y);
  Real h = min(initial_step(f, t0, y0, k1, reltol, abstol), Real(T - t0));
  bool rejected = false;
  constexpr std::size_t kMaxOdeSteps = 20'000'000;

  while (t < T) {
    if (sol.seg_.size() >= kMaxOdeSteps) throw DomainError("ODE step limit exceeded");
    if (h < Real(10) * epsilon<Real>() * max(abs(t), Real(1)))
      throw DomainError("ODE step-size underflow at t=" + format_scalar<Real>(t, 10));
    bool last = false;
    if (t + h >= T) {
      h = T - t;
      last = true;
    }
    const Vec<Real> k2 = eval_rhs(f, Real(t + c2 * h), Vec<Real>(y + h * a21 * k1));
    const Vec<Real> k3 = eval_rhs(f, Real(t + c3 * h), Vec<Real>(y + h * (a31 * k1 + a32 * k2)));
    const Vec<Real> k4 = eval_rhs(f, Real(t + c4 * h), Vec<Real>(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec<Real> k5 =
        eval_rhs(f, Real(t + c5 * h), Vec<Real>(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec<Real> k6 =
        eval_rhs(f, Real(t + h), Vec<Real>(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const Vec<Real> y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Real t1 = last ? T : Real(t + h);
    const Vec<Real> k7 = eval_rhs(f, t1, y1);
    const Vec<Real> err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Real en = rms_norm(err, error_scale(y, y1, reltol, abstol));

    const Real fac = is_finite(en) && en > 0 ? Real(0.9) * pow(en, Real(-0.2)) : Real(10);
    if (is_finite(en) && en <= 1) {
      typename DenseSolution<Real>::Segment s;
      const Vec<Real> ydiff = y1 - y;
      const Vec<Real> bspl = h * k1 - ydiff;
      s.r1 = y;
      s.r2 = ydiff;
      s.r3 = bspl;
      s.r4 = ydiff - h * k7 - bspl;
      s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.seg_.push_back(std::move(s));
      t = t1;
      y = y1;
      k1 = k7;
      sol.t_.push_back(t);
      sol.y_.push_back(y);
      Real grow = min(Real(10), max(Real(0.2), fac));
      if (rejected) grow = min(grow, Real(1));
      rejected = false;
      h *= grow;
    } else {
      rejected = true;
      h *= min(Real(1), max(Real(0.2), fac));
    }
  }
  return sol;
}

template <class Real>
ExtendedState<Real> ReferenceSolution<Real>::state_at(const LagrangianModel<Real>& model, const Real& t) const {
  const Vec<Real> y = dense(t);
  Vec<Real> q = y.head(dim), p = y.tail(dim);
  const Real E = model.hamiltonian(q, p);
  return ExtendedState<Real>{t, std::move(q), std::move(p), E};
}

template <class Real>
Trajectory<Real> ReferenceSolution<Real>::trajectory(const LagrangianModel<Real>& model) const {
  Trajectory<Real> traj;
  const auto& ts = dense.times();
  const auto& ys = dense.values();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Vec<Real> q = ys[i].head(dim), p = ys[i].tail(dim);
    const Real E = model.hamiltonian(q, p);
    traj.states.push_back(ExtendedState<Real>{ts[i], std::move(q), std::move(p), E});
    if (i > 0) traj.steps.push_back(StepRecord<Real>{Real(ts[i] - ts[i - 1]), Real(0), 0, std::nullopt, Real(1)});
  }
  return traj;
}

template <class Real>
ReferenceSolution<Real> reference_solve(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0,
                                        const Real& T_final, const Real& reltol, const Real& abstol) {
  const int n = model.dim();
  if (state0.q.size() != n || state0.p.size() != n) throw ConfigError("state dimension does not match the model");
  OdeRhs<Real> f = [&](const Real&, const Vec<Real>& y) -> Vec<Real> {
    Vec<Real> dy(2 * n);
    dy.head(n) = model.inverse_mass() * y.tail(n);
    dy.tail(n) = -model.gradient(Vec<Real>(y.head(n)));
    return dy;
  };
  Vec<Real> y0(2 * n);
  y0 << state0.q, state0.p;
  return ReferenceSolution<Real>{dopri5_solve<Real>(f, state0.t, y0, T_final, reltol, abstol), n};
}

#define VARINT_INSTANTIATE(Real)                                                                                 \
  template class DenseSolution<Real>;                                                                            \
  template DenseSolution<Real> dopri5_solve<Real>(const OdeRhs<Real>&, const Real&, const Vec<Real>&, const Real&, \
                                                  const Real&, const Real&);                                     \
  template struct ReferenceSolution<Real>;                                                                       \
  template ReferenceSolution<Real> reference_solve<Real>(const LagrangianModel<Real>&, const ExtendedState<Real>&, \
                                                         const Real&, const Real&, const Real&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
