#pragma once

// Backward error analysis in the transformed time a, where t = t(a) is a
// prescribed monotone map and the midpoint scheme takes fixed steps Δa.

#include "varint/integrators.hpp"
#include "varint/reference.hpp"

#include <vector>

namespace varint {

/// Pointwise data (q, q', t', t'', t''') for 1-DOF evaluations at step Δa.
template <class Real>
struct Jet1D {
  Real q;
  Real dq;
  Real dt;
  Real ddt;
  Real dddt;
  Real delta_a;

  /// ConfigError unless t' > 0 and Δa >= 0.
  void validate() const;
};

/// Jet with the second path derivative needed by the meshed Lagrangian.
template <class Real>
struct MeshedJet {
  Real q;
  Real dq;
  Real ddq;
  Real dt;
  Real ddt;
  Real delta_a;
};

/// t(a) = scale a + c sin a.
template <class Real>
class TimeProfile {
 public:
  static TimeProfile identity() { return TimeProfile(Real(1), Real(0)); }
  static TimeProfile linear(const Real& scale) { return TimeProfile(scale, Real(0)); }
  /// t(a) = a + c sin a with |c| < 1.
  static TimeProfile sinusoidal(const Real& c) { return TimeProfile(Real(1), c); }
  /// ConfigError unless the map is monotone for every a.
  TimeProfile(Real scale, Real c);

  Real t(const Real& a) const;
  Real dt(const Real& a) const;
  Real ddt(const Real& a) const;
  Real dddt(const Real& a) const;

  const Real& scale() const noexcept { return scale_; }
  const Real& amplitude() const noexcept { return c_; }

 private:
  Real scale_;
  Real c_;
};

template <class Real>
struct ResidualPair {
  Vec<Real> psi_EL;
  Real psi_E;
};

/// Discrete Euler–Lagrange residuals at the interior node (t0, q0):
/// psi_EL = D4 L_d(prev) + D2 L_d(next), psi_E = D3 L_d(prev) + D1 L_d(next).
template <class Real>
ResidualPair<Real> discrete_residual(const LagrangianModel<Real>& model, const Real& t_prev, const Vec<Real>& q_prev,
                                     const Real& t0, const Vec<Real>& q0, const Real& t_next, const Vec<Real>& q_next,
                                     const Real& delta_a);

/// Second-order modified equation solved for q'':
/// q't''/t' - t'²V_q/m + Δa²/(24m) (4t'⁴V_qV_qq/m - 4q't't''V_qq - q'²t'²V_qqq).
template <class Real>
Real modified_rhs_order2(const LagrangianModel<Real>& model, const Jet1D<Real>& jet);

/// t'(½m(q'/t')² - V) + Δa²/24 (t'³V_q²/m + q'²t'V_qq).
template <class Real>
Real modified_lagrangian_mod3(const LagrangianModel<Real>& model, const Real& q, const Real& dq, const Real& dt,
                              const Real& delta_a);

/// Meshed modified Lagrangian truncated after the Δa² term.
template <class Real>
Real meshed_lagrangian_order2(const LagrangianModel<Real>& model, const MeshedJet<Real>& jet);

template <class Real>
struct OrderOptions {
  Real q0;          // q(0)
  Real dq0 = Real(0);  // q'(0)
  Real window = Real(4);  // integrate over a in [0, window]
  int samples = 10;       // interior sample points per Δa
  Real reltol = Real(1e-12);
  Real abstol = Real(1e-14);
};

template <class Real>
struct OrderEstimate {
  Real slope;    // least-squares slope of log max|psi_EL| against log Δa
  Real slope_E;  // same for psi_E (reported, not asserted)
  std::vector<Real> delta_a;
  std::vector<Real> residual_EL;  // max over samples of |psi_EL|
  std::vector<Real> residual_E;
  /// max over samples of |psi_E|/|psi_EL|, divided by max over samples of |q'/t'|
  Real psi_ratio;
};

/// Integrates the leading-order (use_modified = false) or second-order
/// modified equation for q(a) against the prescribed t(a), evaluates the
/// discrete residuals on triples (a - Δa, a, a + Δa) at interior points at
/// least 2Δa from the window ends, and fits the order.
template <class Real>
OrderEstimate<Real> residual_order_estimate(const LagrangianModel<Real>& model, const TimeProfile<Real>& profile,
                                            bool use_modified, const std::vector<Real>& delta_a_list,
                                            const OrderOptions<Real>& options);

/// Solves the transformed Euler–Lagrange equation q'' = q't''/t' - t'²M⁻¹∇V
/// for q(a) with q(0) = q_0, q'(0) = t'(0)M⁻¹p_0 over a in [0, T] and returns
/// max |q(a) - q_phys(t(a) - t(0))| over the accepted nodes and a uniform
/// grid of 200 points.
template <class Real>
Real reparametrization_check(const LagrangianModel<Real>& model, const TimeProfile<Real>& profile,
                                    const ExtendedState<Real>& state0, const Real& T, const Real& reltol,
                                    const Real& abstol);

template <class Real>
struct FrequencyCheck {
  std::vector<Real> delta_a;
  std::vector<Real> modified;    // -q''/q from modified_rhs_order2 with t(a) = a
  std::vector<Real> exact;       // (2/Δa arctan(ωΔa/2))², implicit midpoint
  std::vector<Real> difference;  // |modified - exact|
  Real slope;                    // log-log slope of the difference
};

/// Oscillator V = ½kq²: compares the squared frequency of the second-order
/// modified equation with the exact discrete frequency of the midpoint rule.
template <class Real>
FrequencyCheck<Real> modified_frequency_check(const Real& k, const Real& m, const std::vector<Real>& delta_a_list);

/// Least-squares slope of log y against log x.
template <class Real>
Real loglog_slope(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace varint
