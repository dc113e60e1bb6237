#pragma once

// Damped Newton iteration for the implicit per-step systems.

#include "varint/linalg.hpp"

#include <functional>
#include <optional>

namespace varint {

template <class Real>
struct SolverConfig {
  Real tol;
  int max_iter = 50;
  std::optional<Real> fd_step;  // unset: eps^(1/3) (1 + |x_j|) per component
  Real condition_warn = Real(1e12);
  /// Extra Newton iterations taken after convergence while the residual keeps
  /// strictly decreasing.
  int refine = 0;

  /// 1e-12 for double, 1e-17 for Extended.
  static SolverConfig defaults();
  /// Throws ConfigError unless tol > 0, max_iter >= 1, fd_step > 0, refine >= 0.
  void validate() const;
};

template <class Real>
struct SolveReport {
  Vec<Real> solution;
  Real residual_norm;
  int iterations = 0;
  /// 1-norm condition estimate of the Jacobian at the returned solution.
  Real condition_estimate;
  bool ill_conditioned = false;  // condition_estimate > condition_warn
};

template <class Real>
using VectorFn = std::function<Vec<Real>(const Vec<Real>&)>;
template <class Real>
using MatrixFn = std::function<Mat<Real>(const Vec<Real>&)>;
/// Rejects trial points outside the admissible set (e.g. negative step size).
template <class Real>
using AcceptFn = std::function<bool(const Vec<Real>&)>;

/// Central differences; entry (i, j) = (F_i(x + d_j e_j) - F_i(x - d_j e_j)) / (2 d_j).
/// A scalar `fd_step` is used for every component; without it the per-component
/// default eps^(1/3) (1 + |x_j|) applies. Non-finite evaluations raise DomainError.
template <class Real>
Mat<Real> fd_jacobian(const VectorFn<Real>& F, const Vec<Real>& x, const std::optional<Real>& fd_step = {});

/// Solves F(x) = 0 to ||F||inf <= cfg.tol. Uses `jacobian` when given, central
/// differences otherwise. Trial steps are halved (at most 10 times) until the
/// residual decreases.
///
/// Throws NonConvergenceError after cfg.max_iter iterations and IllPosedError
/// when the Jacobian at the solution is singular to working precision.
template <class Real>
SolveReport<Real> newton_solve(const VectorFn<Real>& F, const Vec<Real>& x0, const SolverConfig<Real>& cfg,
                               const MatrixFn<Real>& jacobian = nullptr, const AcceptFn<Real>& accept = nullptr);

}  // namespace varint
