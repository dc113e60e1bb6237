#include "support.hpp"
#include "varint/errors.hpp"
#include "varint/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace varint;

namespace {

Vec<double> vec(std::initializer_list<double> xs) {
  Vec<double> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec<double> random_vec(int n, double lo, double hi) {
  Vec<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = test::uniform(lo, hi);
  return v;
}

// Central differences of the potential and its gradient.
void check_fd_derivatives(const LagrangianModel<double>& model, const Vec<double>& q) {
  const double d = 1e-5;
  const int n = model.dim();
  const Vec<double> g = model.gradient(q);
  const Mat<double> H = model.hessian(q);
  for (int j = 0; j < n; ++j) {
    Vec<double> qp = q, qm = q;
    qp[j] += d;
    qm[j] -= d;
    const double gj = (model.potential(qp) - model.potential(qm)) / (2 * d);
    CHECK(std::abs(gj - g[j]) <= 1e-6 * std::max(1.0, std::abs(g[j])));
    const Vec<double> hj = (model.gradient(qp) - model.gradient(qm)) / (2 * d);
    for (int i = 0; i < n; ++i) CHECK(std::abs(hj[i] - H(i, j)) <= 1e-6 * std::max(1.0, std::abs(H(i, j))));
  }
  if (n == 1) {
    Vec<double> qp = q, qm = q;
    qp[0] += d;
    qm[0] -= d;
    const double t = (model.hessian(qp)(0, 0) - model.hessian(qm)(0, 0)) / (2 * d);
    CHECK(std::abs(t - model.third_derivative(q)) <= 1e-6 * std::max(1.0, std::abs(t)));
  }
}

}  // namespace

TEST_CASE("kepler Hamiltonian values") {
  CHECK(kepler_hamiltonian<double>(vec({1, 0}), vec({0, 1})) == doctest::Approx(-0.5).epsilon(1e-15));
  for (double e : {0.05, 0.2, 0.4, 0.6, 0.8}) {
    const double h = kepler_hamiltonian<double>(vec({1 - e, 0}), vec({0, std::sqrt((1 + e) / (1 - e))}));
    CHECK(h == doctest::Approx(-0.5).epsilon(1e-14));
  }
  CHECK_THROWS_AS(kepler_hamiltonian<double>(vec({0, 0}), vec({0.3, 0.1})), DomainError);
  CHECK_THROWS_AS(kepler_hamiltonian<double>(vec({1e-9, 0}), vec({0, 0})), DomainError);
}

TEST_CASE("kepler initial states") {
  const auto s1 = kepler_initial_state<double>(0.1);
  CHECK(s1.q[0] == doctest::Approx(0.9));
  CHECK(s1.q[1] == 0.0);
  CHECK(s1.p[0] == 0.0);
  CHECK(s1.p[1] == doctest::Approx(std::sqrt(1.1 / 0.9)));
  const auto s7 = kepler_initial_state<double>(0.7);
  CHECK(s7.q[0] == doctest::Approx(0.3));
  CHECK(s7.p[1] == doctest::Approx(std::sqrt(1.7 / 0.3)));
  const auto s0 = kepler_initial_state<double>(0.0);
  CHECK(s0.q.norm() == doctest::Approx(1.0));
  CHECK(s0.p.norm() == doctest::Approx(1.0));
  CHECK(s0.E == doctest::Approx(-0.5));
  CHECK(s0.t == 0.0);
  CHECK_THROWS_AS(kepler_initial_state<double>(1.0), ConfigError);
  CHECK_THROWS_AS(kepler_initial_state<double>(-0.1), ConfigError);
}

TEST_CASE("initial Hamiltonian is -1/2 for every eccentricity") {
  for (int i = 0; i < 20; ++i) {
    const double e = 0.9 * i / 19.0;
    const auto s = kepler_initial_state<double>(e);
    CHECK(std::abs(kepler_hamiltonian<double>(s.q, s.p) + 0.5) <= 8 * epsilon<double>() / (1 - e));
    CHECK(s.E == kepler_hamiltonian<double>(s.q, s.p));
  }
}

TEST_CASE("potential derivatives of the built-in models") {
  const auto osc = LagrangianModel<double>::oscillator(1.0, 1.0);
  const auto d = osc.potential_derivs(vec({2}), 3);
  CHECK(d.value == 2.0);
  CHECK(d.gradient[0] == 2.0);
  CHECK(d.hessian(0, 0) == 1.0);
  CHECK(*d.third == 0.0);

  const auto pen = LagrangianModel<double>::pendulum(1.0);
  const auto dp = pen.potential_derivs(vec({0}), 3);
  CHECK(dp.value == -1.0);
  CHECK(dp.gradient[0] == 0.0);
  CHECK(dp.hessian(0, 0) == 1.0);
  CHECK(*dp.third == 0.0);

  const auto kep = LagrangianModel<double>::kepler();
  const auto dk = kep.potential_derivs(vec({0.3, 0}), 2);
  CHECK(dk.value == doctest::Approx(-10.0 / 3));
  CHECK(dk.gradient[0] == doctest::Approx(0.3 / 0.027));
  CHECK(dk.gradient[1] == 0.0);
  CHECK_THROWS_AS(kep.potential_derivs(vec({0.3, 0}), 3), UnsupportedOrderError);
  CHECK_THROWS_AS(kep.third_derivative(vec({0.3, 0})), UnsupportedOrderError);
  CHECK_THROWS_AS(osc.potential_derivs(vec({1}), 4), UnsupportedOrderError);
}

TEST_CASE("analytic derivatives match finite differences at random points") {
  const auto kep = LagrangianModel<double>::kepler();
  const auto osc = LagrangianModel<double>::oscillator(2.5, 0.7);
  const auto pen = LagrangianModel<double>::pendulum(1.3);
  const auto free = LagrangianModel<double>::free_particle(3, 2.0);
  for (int i = 0; i < 100; ++i) {
    Vec<double> qk = random_vec(2, -2, 2);
    if (qk.norm() < 0.2) qk[0] += 0.5;
    check_fd_derivatives(kep, qk);
    check_fd_derivatives(osc, random_vec(1, -3, 3));
    check_fd_derivatives(pen, random_vec(1, -3, 3));
    check_fd_derivatives(free, random_vec(3, -3, 3));
  }
}

TEST_CASE("Legendre identity H(q, M qdot) + L(q, qdot) = qdot' M qdot") {
  const auto kep = LagrangianModel<double>::kepler();
  const auto osc = LagrangianModel<double>::oscillator(2.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    Vec<double> q = random_vec(2, 0.5, 2);
    Vec<double> v = random_vec(2, -2, 2);
    const double lhs = kep.hamiltonian(q, kep.mass() * v) + kep.lagrangian(q, v);
    CHECK(lhs == doctest::Approx(v.dot(kep.mass() * v)).epsilon(1e-12));
    Vec<double> q1 = random_vec(1, -2, 2), v1 = random_vec(1, -2, 2);
    CHECK(osc.hamiltonian(q1, osc.mass() * v1) + osc.lagrangian(q1, v1) ==
          doctest::Approx(v1.dot(osc.mass() * v1)).epsilon(1e-12));
  }
}

TEST_CASE("angular momentum is rotation invariant") {
  for (int i = 0; i < 50; ++i) {
    const double th = test::uniform(0, 6.283);
    Mat<double> R(2, 2);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Vec<double> q = random_vec(2, -2, 2), p = random_vec(2, -2, 2);
    CHECK(angular_momentum<double>(Vec<double>(R * q), Vec<double>(R * p)) ==
          doctest::Approx(angular_momentum<double>(q, p)).epsilon(1e-13));
  }
}

TEST_CASE("model construction and state checks") {
  CHECK_THROWS_AS(LagrangianModel<double>::oscillator(1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(LagrangianModel<double>::pendulum(0.0), ConfigError);
  const auto osc = LagrangianModel<double>::oscillator(1.0, 2.0);
  CHECK(osc.scalar_mass() == 2.0);
  CHECK(osc.inverse_mass()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(osc.potential(vec({1, 2})), ConfigError);
  CHECK_THROWS_AS(make_initial_state(osc, vec({1}), vec({1, 2})), ConfigError);
  const auto s = make_initial_state(osc, vec({1}), vec({2}));
  CHECK(s.E == doctest::Approx(0.5 * 4 / 2 + 0.5));
  CHECK(std::string(to_string(ModelKind::Kepler)) == "kepler");
}
