#include "varint/solvers.hpp"

#include "varint/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <vector>

namespace varint {

template <class Real>
SolverConfig<Real> SolverConfig<Real>::defaults() {
  SolverConfig cfg;
  cfg.tol = std::is_same_v<Real, double> ? Real(1e-12) : Real(1e-17);
  return cfg;
}

template <class Real>
void SolverConfig<Real>::validate() const {
  if (!(tol > 0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (fd_step && !(*fd_step > 0)) throw ConfigError("fd_step must be positive");
  if (!(condition_warn > 0)) throw ConfigError("condition_warn must be positive");
  if (refine < 0) throw ConfigError("refine must be non-negative");
}

namespace {

template <class Real>
std::vector<double> to_doubles(const Vec<Real>& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) out[static_cast<std::size_t>(i)] = to_double(x[i]);
  return out;
}

template <class Real>
Vec<Real> checked_eval(const VectorFn<Real>& F, const Vec<Real>& x) {
  Vec<Real> r = F(x);
  if (!all_finite(r)) throw DomainError("residual evaluation produced a non-finite value");
  return r;
}

// Residual of a trial point, or nullopt when the point is inadmissible.
template <class Real>
std::optional<Vec<Real>> try_eval(const VectorFn<Real>& F, const AcceptFn<Real>& accept, const Vec<Real>& x) {
  if (!all_finite(x)) return std::nullopt;
  if (accept && !accept(x)) return std::nullopt;
  try {
    Vec<Real> r = F(x);
    if (!all_finite(r)) return std::nullopt;
    return r;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

template <class Real>
struct Factored {
  Eigen::PartialPivLU<Mat<Real>> lu;
  Real rcond;
};

template <class Real>
Factored<Real> factor(const Mat<Real>& J) {
  if (J.rows() != J.cols()) throw ConfigError("Newton system must be square");
  for (Eigen::Index i = 0; i < J.size(); ++i)
    if (!is_finite(J.data()[i])) throw DomainError("Jacobian has a non-finite entry");
  Factored<Real> f{Eigen::PartialPivLU<Mat<Real>>(J), Real(0)};
  // rcond() reports 1 for an exactly zero pivot, so the pivots are checked first.
  using std::abs;
  const auto u = f.lu.matrixLU().diagonal();
  Real umin = abs(u[0]), umax = abs(u[0]);
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    umin = std::min<Real>(umin, abs(u[i]));
    umax = std::max<Real>(umax, abs(u[i]));
  }
  Real rc = umax > 0 && umin / umax > epsilon<Real>() ? Real(f.lu.rcond()) : Real(0);
  f.rcond = is_finite(rc) ? rc : Real(0);
  if (!(f.rcond > epsilon<Real>()))
    throw IllPosedError("Jacobian is singular to working precision (rcond " + format_scalar<Real>(f.rcond, 3) + ")");
  return f;
}

}  // namespace

template <class Real>
Mat<Real> fd_jacobian(const VectorFn<Real>& F, const Vec<Real>& x, const std::optional<Real>& fd_step) {
  using std::abs;
  using std::cbrt;
  if (fd_step && !(*fd_step > 0)) throw ConfigError("fd_step must be positive");
  const Real base = cbrt(epsilon<Real>());
  Mat<Real> J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const Real d = fd_step ? *fd_step : base * (Real(1) + abs(x[j]));
    Vec<Real> xp = x, xm = x;
    xp[j] += d;
    xm[j] -= d;
    Vec<Real> fp = checked_eval(F, xp);
    Vec<Real> fm = checked_eval(F, xm);
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (xp[j] - xm[j]);
  }
  return J;
}

template <class Real>
SolveReport<Real> newton_solve(const VectorFn<Real>& F, const Vec<Real>& x0, const SolverConfig<Real>& cfg,
                               const MatrixFn<Real>& jacobian, const AcceptFn<Real>& accept) {
  cfg.validate();
  auto jac = [&](const Vec<Real>& x) { return jacobian ? jacobian(x) : fd_jacobian<Real>(F, x, cfg.fd_step); };

  Vec<Real> x = x0;
  Vec<Real> r = checked_eval(F, x);
  Real norm = inf_norm(r);
  Vec<Real> best = x;
  Real best_norm = norm;

  int iter = 0;
  while (!(norm <= cfg.tol)) {
    if (iter == cfg.max_iter)
      throw NonConvergenceError("Newton did not reach tol " + format_scalar<Real>(cfg.tol, 3) + " in " +
                                    std::to_string(cfg.max_iter) + " iterations (residual " +
                                    format_scalar<Real>(best_norm, 3) + ")",
                                to_doubles(best), to_double(best_norm));
    ++iter;
    const Vec<Real> dx = factor<Real>(jac(x)).lu.solve(r);

    Real lambda(1);
    std::optional<Vec<Real>> fallback_x, fallback_r;
    bool moved = false;
    for (int halving = 0; halving <= 10; ++halving, lambda /= 2) {
      Vec<Real> xt = x - lambda * dx;
      auto rt = try_eval(F, accept, xt);
      if (!rt) continue;
      if (inf_norm(*rt) < norm) {
        x = std::move(xt);
        r = std::move(*rt);
        moved = true;
        break;
      }
      if (!fallback_x) {
        fallback_x = std::move(xt);
        fallback_r = std::move(*rt);
      }
    }
    // No decrease along the direction: take the longest admissible step so the
    // iteration can still leave a flat region; the cap bounds the cost.
    if (!moved && fallback_x) {
      x = std::move(*fallback_x);
      r = std::move(*fallback_r);
    }
    norm = inf_norm(r);
    if (norm < best_norm) {
      best = x;
      best_norm = norm;
    }
  }

  for (int k = 0; k < cfg.refine && norm > 0; ++k) {
    const Vec<Real> xt = x - factor<Real>(jac(x)).lu.solve(r);
    auto rt = try_eval(F, accept, xt);
    if (!rt || !(inf_norm(*rt) < norm)) break;
    x = xt;
    r = std::move(*rt);
    norm = inf_norm(r);
  }

  const Factored<Real> f = factor<Real>(jac(x));
  SolveReport<Real> report{x, norm, iter, Real(1) / f.rcond, false};
  report.ill_conditioned = report.condition_estimate > cfg.condition_warn;
  return report;
}

#define VARINT_INSTANTIATE(Real)                                                                             \
  template struct SolverConfig<Real>;                                                                        \
  template Mat<Real> fd_jacobian<Real>(const VectorFn<Real>&, const Vec<Real>&, const std::optional<Real>&); \
  template SolveReport<Real> newton_solve<Real>(const VectorFn<Real>&, const Vec<Real>&,                     \
                                                const SolverConfig<Real>&, const MatrixFn<Real>&,            \
                                                const AcceptFn<Real>&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
