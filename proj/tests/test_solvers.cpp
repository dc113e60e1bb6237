#include "support.hpp"
#include "varint/errors.hpp"
#include "varint/integrators.hpp"
#include "varint/solvers.hpp"

#include <doctest.h>

#include <cmath>

using namespace varint;

namespace {

Vec<double> vec1(double x) {
  Vec<double> v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("solver config defaults and validation") {
  CHECK(SolverConfig<double>::defaults().tol == 1e-12);
  {
    test::ExtendedDigits d(18);
    CHECK(abs(SolverConfig<Extended>::defaults().tol / Extended("1e-17") - 1) <= 1e-15);
  }
  SolverConfig<double> c = SolverConfig<double>::defaults();
  c.tol = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig<double>::defaults();
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig<double>::defaults();
  c.fd_step = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SolverConfig<double>::defaults();
  c.refine = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("scalar quadratic root") {
  VectorFn<double> F = [](const Vec<double>& x) { return vec1(x[0] * x[0] - 4); };
  const auto rep = newton_solve<double>(F, vec1(3), SolverConfig<double>::defaults());
  CHECK(rep.solution[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.residual_norm <= 1e-12);
  CHECK(rep.iterations <= 8);
}

TEST_CASE("identity map converges immediately") {
  VectorFn<double> F = [](const Vec<double>& x) { return x; };
  const auto rep = newton_solve<double>(F, vec1(0), SolverConfig<double>::defaults());
  CHECK(rep.solution[0] == 0.0);
  CHECK(rep.iterations <= 1);
}

TEST_CASE("quadratic convergence from nearby guesses") {
  // Test set: polynomial and transcendental systems with known roots.
  struct Problem {
    VectorFn<double> F;
    Vec<double> root;
  };
  Vec<double> r2(2);
  r2 << 1.0, 2.0;
  std::vector<Problem> set = {
      {[](const Vec<double>& x) { return vec1(x[0] * x[0] * x[0] - 8); }, vec1(2)},
      {[](const Vec<double>& x) { return vec1(std::exp(x[0]) - std::exp(1.5)); }, vec1(1.5)},
      {[](const Vec<double>& x) {
         Vec<double> r(2);
         r << x[0] * x[0] + x[1] * x[1] - 5, x[0] * x[1] - 2;
         return r;
       },
       r2},
  };
  for (const auto& p : set) {
    for (int i = 0; i < 10; ++i) {
      Vec<double> x0 = p.root;
      for (Eigen::Index j = 0; j < x0.size(); ++j) x0[j] *= 1 + test::uniform(-0.1, 0.1);
      const auto rep = newton_solve<double>(p.F, x0, SolverConfig<double>::defaults());
      CHECK(rep.iterations <= 8);
      CHECK((rep.solution - p.root).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
}

TEST_CASE("nonconvergence carries the best iterate") {
  VectorFn<double> F = [](const Vec<double>& x) { return vec1(x[0] * x[0] + 1); };
  SolverConfig<double> cfg = SolverConfig<double>::defaults();
  cfg.max_iter = 5;
  try {
    newton_solve<double>(F, vec1(0.5), cfg);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    REQUIRE(e.best_iterate().size() == 1);
    CHECK(e.best_residual() >= 1.0);
    CHECK(e.best_residual() == doctest::Approx(e.best_iterate()[0] * e.best_iterate()[0] + 1));
  }
}

TEST_CASE("singular Jacobian at the solution is ill-posed") {
  VectorFn<double> F = [](const Vec<double>& x) {
    Vec<double> r(2);
    r << x[0] - 1, 0.0;
    return r;
  };
  Vec<double> x0(2);
  x0 << 0.5, 0.0;
  CHECK_THROWS_AS(newton_solve<double>(F, x0, SolverConfig<double>::defaults()), IllPosedError);
}

TEST_CASE("EpAVI system of a resting free particle is ill-posed") {
  const auto free = LagrangianModel<double>::free_particle(1, 1.0);
  const ExtendedState<double> s{0.0, vec1(0.0), vec1(0.0), 0.0};
  CHECK_THROWS_AS(epavi_step(free, s, 0.1, SolverConfig<double>::defaults()), IllPosedError);
}

TEST_CASE("finite-difference Jacobians") {
  VectorFn<double> id = [](const Vec<double>& x) { return x; };
  Vec<double> x(2);
  x << 0.3, -1.7;
  CHECK((fd_jacobian(id, x) - Mat<double>::Identity(2, 2)).lpNorm<Eigen::Infinity>() <= 1e-10);
  VectorFn<double> sq = [](const Vec<double>& y) { return vec1(y[0] * y[0]); };
  CHECK(fd_jacobian(sq, vec1(3))(0, 0) == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(fd_jacobian<double>(sq, vec1(3), std::optional<double>(1e-3))(0, 0) == doctest::Approx(6.0).epsilon(1e-9));
  VectorFn<double> bad = [](const Vec<double>& y) { return vec1(std::log(y[0])); };
  CHECK_THROWS_AS(fd_jacobian(bad, vec1(0.0)), DomainError);
}

TEST_CASE("FD Jacobian of the Kepler EpAVI residual matches the analytic one") {
  const auto kep = LagrangianModel<double>::kepler();
  auto s = kepler_initial_state<double>(0.7);
  s.E = epavi_seed_energy(kep, s, 0.001, SolverConfig<double>::defaults());
  Vec<double> x(3);
  x << 0.001, -1.1e-5, 2.38e-3;
  VectorFn<double> F = [&](const Vec<double>& y) { return epavi_residual(kep, s, y); };
  // The energy row varies like 1/h^2, so the default relative FD step is too coarse here.
  const Mat<double> fd = fd_jacobian<double>(F, x, std::optional<double>(1e-8));
  const Mat<double> an = epavi_jacobian(kep, s, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(fd(i, j) - an(i, j)) <= 1e-6 * std::max(1.0, std::abs(an(i, j))));
}

TEST_CASE("solver is pure") {
  VectorFn<double> F = [](const Vec<double>& x) {
    Vec<double> r(2);
    r << std::sin(x[0]) + x[1] * x[1] - 1.2, x[0] - std::cos(x[1]);
    return r;
  };
  Vec<double> x0(2);
  x0 << 0.75, 0.7;
  const auto a = newton_solve<double>(F, x0, SolverConfig<double>::defaults());
  const auto b = newton_solve<double>(F, x0, SolverConfig<double>::defaults());
  CHECK(a.solution == b.solution);
  CHECK(a.residual_norm == b.residual_norm);
  CHECK(a.iterations == b.iterations);
  CHECK(a.condition_estimate == b.condition_estimate);
}

TEST_CASE("admissibility predicate keeps evaluations in the admissible set") {
  // The full Newton step from 1.2 lands at x < 0.
  bool evaluated_outside = false;
  VectorFn<double> F = [&](const Vec<double>& x) {
    if (x[0] <= 0) evaluated_outside = true;
    return vec1(1 / x[0] - 2);
  };
  AcceptFn<double> positive = [](const Vec<double>& x) { return x[0] > 0; };
  const auto rep = newton_solve<double>(F, vec1(1.2), SolverConfig<double>::defaults(), nullptr, positive);
  CHECK(rep.solution[0] == doctest::Approx(0.5));
  CHECK_FALSE(evaluated_outside);
}

TEST_CASE("extended precision solve reaches 1e-25") {
  test::ExtendedDigits d(30);
  SolverConfig<Extended> cfg = SolverConfig<Extended>::defaults();
  cfg.tol = Extended("1e-25");
  VectorFn<Extended> F = [](const Vec<Extended>& x) {
    Vec<Extended> r(1);
    r << x[0] * x[0] - 2;
    return r;
  };
  Vec<Extended> x0(1);
  x0 << Extended(1);
  const auto rep = newton_solve<Extended>(F, x0, cfg);
  CHECK(abs(rep.solution[0] - sqrt(Extended(2))) < Extended("1e-25"));
}
