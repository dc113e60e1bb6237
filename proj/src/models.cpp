#include "varint/models.hpp"

#include "varint/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace varint {

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Kepler: return "kepler";
    case ModelKind::Oscillator: return "oscillator";
    case ModelKind::Pendulum: return "pendulum";
    case ModelKind::FreeParticle: return "free";
  }
  return "unknown";
}

template <class Real>
LagrangianModel<Real>::LagrangianModel(ModelKind kind, Mat<Real> mass, Real k)
    : kind_(kind), mass_(std::move(mass)), k_(std::move(k)) {
  if (mass_.rows() < 1 || mass_.rows() != mass_.cols()) throw ConfigError("mass matrix must be square");
  if (!mass_.isApprox(mass_.transpose())) throw ConfigError("mass matrix must be symmetric");
  Eigen::LLT<Mat<Real>> llt(mass_);
  if (llt.info() != Eigen::Success) throw ConfigError("mass matrix must be positive definite");
  inverse_mass_ = llt.solve(Mat<Real>::Identity(mass_.rows(), mass_.cols()));
}

template <class Real>
LagrangianModel<Real> LagrangianModel<Real>::kepler() {
  return LagrangianModel(ModelKind::Kepler, Mat<Real>::Identity(2, 2), Real(0));
}

template <class Real>
LagrangianModel<Real> LagrangianModel<Real>::oscillator(const Real& k, const Real& m) {
  if (!(k > 0)) throw ConfigError("oscillator stiffness k must be positive");
  Mat<Real> mass(1, 1);
  mass(0, 0) = m;
  return LagrangianModel(ModelKind::Oscillator, std::move(mass), k);
}

template <class Real>
LagrangianModel<Real> LagrangianModel<Real>::pendulum(const Real& m) {
  Mat<Real> mass(1, 1);
  mass(0, 0) = m;
  return LagrangianModel(ModelKind::Pendulum, std::move(mass), Real(0));
}

template <class Real>
LagrangianModel<Real> LagrangianModel<Real>::free_particle(int n, const Real& m) {
  if (n < 1) throw ConfigError("free particle dimension must be positive");
  return LagrangianModel(ModelKind::FreeParticle, Mat<Real>::Identity(n, n) * m, Real(0));
}

template <class Real>
Real LagrangianModel<Real>::scalar_mass() const {
  if (dim() != 1) throw UnsupportedOrderError("scalar mass requested for a multi-dimensional model");
  return mass_(0, 0);
}

template <class Real>
void LagrangianModel<Real>::check_dim(const Vec<Real>& q) const {
  if (q.size() != dim())
    throw ConfigError("configuration has dimension " + std::to_string(q.size()) + ", model expects " +
                      std::to_string(dim()));
}

template <class Real>
Real LagrangianModel<Real>::kepler_radius(const Vec<Real>& q) const {
  using std::sqrt;
  Real r = sqrt(q.squaredNorm());
  if (!(r >= Real(kKeplerCollisionRadius)))
    throw DomainError("gravitational collision: |q| below " + std::to_string(kKeplerCollisionRadius));
  return r;
}

template <class Real>
Real LagrangianModel<Real>::potential(const Vec<Real>& q) const {
  check_dim(q);
  using std::cos;
  switch (kind_) {
    case ModelKind::Kepler: return -Real(1) / kepler_radius(q);
    case ModelKind::Oscillator: return k_ * q[0] * q[0] / 2;
    case ModelKind::Pendulum: return -cos(q[0]);
    case ModelKind::FreeParticle: return Real(0);
  }
  return Real(0);
}

template <class Real>
Vec<Real> LagrangianModel<Real>::gradient(const Vec<Real>& q) const {
  check_dim(q);
  using std::sin;
  switch (kind_) {
    case ModelKind::Kepler: {
      Real r = kepler_radius(q);
      return q / (r * r * r);
    }
    case ModelKind::Oscillator: return q * k_;
    case ModelKind::Pendulum: {
      Vec<Real> g(1);
      g[0] = sin(q[0]);
      return g;
    }
    case ModelKind::FreeParticle: return Vec<Real>::Zero(q.size());
  }
  return Vec<Real>::Zero(q.size());
}

template <class Real>
Mat<Real> LagrangianModel<Real>::hessian(const Vec<Real>& q) const {
  check_dim(q);
  using std::cos;
  const auto n = q.size();
  switch (kind_) {
    case ModelKind::Kepler: {
      Real r = kepler_radius(q);
      Real r3 = r * r * r;
      return Mat<Real>::Identity(n, n) / r3 - (q * q.transpose()) * (Real(3) / (r3 * r * r));
    }
    case ModelKind::Oscillator: return Mat<Real>::Identity(1, 1) * k_;
    case ModelKind::Pendulum: return Mat<Real>::Identity(1, 1) * cos(q[0]);
    case ModelKind::FreeParticle: return Mat<Real>::Zero(n, n);
  }
  return Mat<Real>::Zero(n, n);
}

template <class Real>
Real LagrangianModel<Real>::third_derivative(const Vec<Real>& q) const {
  check_dim(q);
  if (dim() != 1) throw UnsupportedOrderError("third potential derivative is only available for 1-DOF models");
  using std::sin;
  switch (kind_) {
    case ModelKind::Pendulum: return -sin(q[0]);
    default: return Real(0);
  }
}

template <class Real>
PotentialDerivs<Real> LagrangianModel<Real>::potential_derivs(const Vec<Real>& q, int order) const {
  if (order < 0 || order > 3) throw UnsupportedOrderError("derivative order must be in 0..3");
  if (order == 3 && dim() != 1)
    throw UnsupportedOrderError("third potential derivative is only available for 1-DOF models");
  PotentialDerivs<Real> d{potential(q), {}, {}, std::nullopt};
  if (order >= 1) d.gradient = gradient(q);
  if (order >= 2) d.hessian = hessian(q);
  if (order >= 3) d.third = third_derivative(q);
  return d;
}

template <class Real>
Real LagrangianModel<Real>::kinetic_from_velocity(const Vec<Real>& qdot) const {
  return qdot.dot(mass_ * qdot) / 2;
}

template <class Real>
Real LagrangianModel<Real>::lagrangian(const Vec<Real>& q, const Vec<Real>& qdot) const {
  return kinetic_from_velocity(qdot) - potential(q);
}

template <class Real>
Real LagrangianModel<Real>::hamiltonian(const Vec<Real>& q, const Vec<Real>& p) const {
  return p.dot(inverse_mass_ * p) / 2 + potential(q);
}

template <class Real>
Real kepler_hamiltonian(const Vec<Real>& q, const Vec<Real>& p) {
  if (q.size() != 2 || p.size() != 2) throw ConfigError("Kepler state must be two-dimensional");
  return LagrangianModel<Real>::kepler().hamiltonian(q, p);
}

template <class Real>
ExtendedState<Real> kepler_initial_state(const Real& e) {
  if (!(e >= 0 && e < 1)) throw ConfigError("eccentricity must lie in [0, 1)");
  using std::sqrt;
  Vec<Real> q(2), p(2);
  q << Real(1) - e, Real(0);
  p << Real(0), sqrt((Real(1) + e) / (Real(1) - e));
  return ExtendedState<Real>{Real(0), q, p, kepler_hamiltonian<Real>(q, p)};
}

template <class Real>
Real angular_momentum(const Vec<Real>& q, const Vec<Real>& p) {
  if (q.size() != 2 || p.size() != 2) throw ConfigError("angular momentum needs planar states");
  return q[0] * p[1] - q[1] * p[0];
}

template <class Real>
ExtendedState<Real> make_initial_state(const LagrangianModel<Real>& model, const Vec<Real>& q0,
                                       const Vec<Real>& p0) {
  if (q0.size() != model.dim() || p0.size() != model.dim())
    throw ConfigError("initial state dimension does not match the model");
  return ExtendedState<Real>{Real(0), q0, p0, model.hamiltonian(q0, p0)};
}

#define VARINT_INSTANTIATE(Real)                                                                    \
  template class LagrangianModel<Real>;                                                             \
  template Real kepler_hamiltonian<Real>(const Vec<Real>&, const Vec<Real>&);                       \
  template ExtendedState<Real> kepler_initial_state<Real>(const Real&);                             \
  template Real angular_momentum<Real>(const Vec<Real>&, const Vec<Real>&);                         \
  template ExtendedState<Real> make_initial_state<Real>(const LagrangianModel<Real>&, const Vec<Real>&, \
                                                        const Vec<Real>&);

VARINT_INSTANTIATE(double)
VARINT_INSTANTIATE(Extended)

}  // namespace varint
