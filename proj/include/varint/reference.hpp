#pragma once

// Dormand–Prince 5(4) with the standard 4th-order-accurate dense output.

#include "varint/integrators.hpp"

#include <functional>
#include <vector>

namespace varint {

template <class Real>
using OdeRhs = std::function<Vec<Real>(const Real& t, const Vec<Real>& y)>;

template <class Real>
class DenseSolution {
 public:
  const std::vector<Real>& times() const noexcept { return t_; }
  const std::vector<Vec<Real>>& values() const noexcept { return y_; }
  const Real& t_begin() const { return t_.front(); }
  const Real& t_end() const { return t_.back(); }
  std::size_t num_steps() const noexcept { return seg_.size(); }

  /// Interpolated solution; DomainError outside [t_begin, t_end].
  Vec<Real> operator()(const Real& t) const;

 private:
  template <class R>
  friend DenseSolution<R> dopri5_solve(const OdeRhs<R>&, const R&, const Vec<R>&, const R&, const R&, const R&);

  struct Segment {
    Vec<Real> r1, r2, r3, r4, r5;
  };
  std::vector<Real> t_;
  std::vector<Vec<Real>> y_;
  std::vector<Segment> seg_;  // seg_[i] spans [t_[i], t_[i+1]]
};

/// Integrates y' = f(t, y) from t0 to T (T >= t0) with mixed error control
/// atol + rtol max(|y_old|, |y_new|) in the RMS norm. Step-size underflow
/// raises DomainError.
template <class Real>
DenseSolution<Real> dopri5_solve(const OdeRhs<Real>& f, const Real& t0, const Vec<Real>& y0, const Real& T,
                                 const Real& reltol, const Real& abstol);

template <class Real>
struct ReferenceSolution {
  DenseSolution<Real> dense;  // y = (q, p)
  int dim = 0;

  /// (q, p) at an arbitrary time in the span.
  ExtendedState<Real> state_at(const LagrangianModel<Real>& model, const Real& t) const;
  /// Accepted nodes as a Trajectory with E = H(q, p).
  Trajectory<Real> trajectory(const LagrangianModel<Real>& model) const;
};

/// Hamilton's equations q' = M⁻¹p, p' = -∇V(q).
template <class Real>
ReferenceSolution<Real> reference_solve(const LagrangianModel<Real>& model, const ExtendedState<Real>& state0,
                                        const Real& T_final, const Real& reltol, const Real& abstol);

}  // namespace varint
