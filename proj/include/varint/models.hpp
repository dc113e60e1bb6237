#pragma once

// Problem definitions: separable mechanical systems L = ½ q̇ᵀM q̇ − V(q)
// with constant SPD mass matrix.

#include "varint/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varint {

enum class ModelKind { Kepler, Oscillator, Pendulum, FreeParticle };

const char* to_string(ModelKind kind) noexcept;

/// Radius below which the Kepler potential is treated as a collision.
inline constexpr double kKeplerCollisionRadius = 1e-8;

template <class Real>
struct PotentialDerivs {
  Real value;
  Vec<Real> gradient;
  Mat<Real> hessian;
  std::optional<Real> third;  // only for one-dimensional models
};

template <class Real>
struct ExtendedState {
  Real t;
  Vec<Real> q;
  Vec<Real> p;
  Real E;  // discrete energy (EpAVI) or H(q, p) (everything else)
};

template <class Real>
class LagrangianModel {
 public:
  /// V = −1/|q|, n = 2, M = I.
  static LagrangianModel kepler();
  /// V = ½ k q², n = 1, M = m.
  static LagrangianModel oscillator(const Real& k, const Real& m);
  /// V = −cos q, n = 1, M = m.
  static LagrangianModel pendulum(const Real& m);
  /// V = 0 in n dimensions, M = m I.
  static LagrangianModel free_particle(int n, const Real& m);

  ModelKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(mass_.rows()); }
  const Mat<Real>& mass() const noexcept { return mass_; }
  const Mat<Real>& inverse_mass() const noexcept { return inverse_mass_; }
  /// Scalar mass of a one-dimensional model.
  Real scalar_mass() const;
  const Real& stiffness() const noexcept { return k_; }

  Real potential(const Vec<Real>& q) const;
  Vec<Real> gradient(const Vec<Real>& q) const;
  Mat<Real> hessian(const Vec<Real>& q) const;
  /// d³V/dq³; UnsupportedOrderError when dim() > 1.
  Real third_derivative(const Vec<Real>& q) const;

  /// Derivatives up to `order` (0..3). Order 3 requires dim() == 1.
  PotentialDerivs<Real> potential_derivs(const Vec<Real>& q, int order) const;

  Real lagrangian(const Vec<Real>& q, const Vec<Real>& qdot) const;
  Real hamiltonian(const Vec<Real>& q, const Vec<Real>& p) const;
  Real kinetic_from_velocity(const Vec<Real>& qdot) const;

 private:
  LagrangianModel(ModelKind kind, Mat<Real> mass, Real k);
  void check_dim(const Vec<Real>& q) const;
  Real kepler_radius(const Vec<Real>& q) const;

  ModelKind kind_;
  Mat<Real> mass_;
  Mat<Real> inverse_mass_;
  Real k_;
};

/// ((p¹)² + (p²)²)/2 − 1/|q|; DomainError on collision.
template <class Real>
Real kepler_hamiltonian(const Vec<Real>& q, const Vec<Real>& p);

/// t = 0, q = (1−e, 0), p = (0, √((1+e)/(1−e))), E = H(q, p).
template <class Real>
ExtendedState<Real> kepler_initial_state(const Real& e);

/// Planar angular momentum q¹p² − q²p¹.
template <class Real>
Real angular_momentum(const Vec<Real>& q, const Vec<Real>& p);

/// Initial state for one-dimensional models with E = H(q0, p0).
template <class Real>
ExtendedState<Real> make_initial_state(const LagrangianModel<Real>& model, const Vec<Real>& q0,
                                       const Vec<Real>& p0);

}  // namespace varint
