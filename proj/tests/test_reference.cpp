#include "support.hpp"
#include "varint/errors.hpp"
#include "varint/reference.hpp"

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

}  // namespace

TEST_CASE("exponential growth against exp") {
  OdeRhs<double> f = [](const double&, const Vec<double>& y) { return y; };
  const auto sol = dopri5_solve<double>(f, 0.0, vec({1}), 2.0, 1e-12, 1e-14);
  CHECK(sol.t_end() == 2.0);
  CHECK(std::abs(sol.values().back()[0] - std::exp(2.0)) <= 1e-10 * std::exp(2.0));
  for (std::size_t i = 0; i + 1 < sol.times().size(); ++i) {
    const double t = (sol.times()[i] + sol.times()[i + 1]) / 2;
    CHECK(std::abs(sol(t)[0] - std::exp(t)) <= 1e-9 * std::exp(t));
  }
}

TEST_CASE("dense output reproduces the nodes and rejects times outside the span") {
  OdeRhs<double> f = [](const double& t, const Vec<double>& y) { return vec({y[1], -y[0] + 0 * t}); };
  const auto sol = dopri5_solve<double>(f, 1.0, vec({1, 0}), 11.0, 1e-12, 1e-14);
  for (std::size_t i = 0; i < sol.times().size(); ++i)
    CHECK((sol(sol.times()[i]) - sol.values()[i]).lpNorm<Eigen::Infinity>() <= 1e-14);
  for (double t : {1.0, 3.7, 8.2, 11.0}) {
    const Vec<double> y = sol(t);
    CHECK(std::abs(y[0] - std::cos(t - 1)) <= 1e-9);
    CHECK(std::abs(y[1] + std::sin(t - 1)) <= 1e-9);
  }
  CHECK_THROWS_AS(sol(0.5), DomainError);
  CHECK_THROWS_AS(sol(11.5), DomainError);
}

TEST_CASE("zero-length span") {
  OdeRhs<double> f = [](const double&, const Vec<double>& y) { return y; };
  const auto sol = dopri5_solve<double>(f, 3.0, vec({2}), 3.0, 1e-10, 1e-12);
  CHECK(sol.num_steps() == 0);
  CHECK(sol(3.0)[0] == 2.0);
}

TEST_CASE("Kepler reference orbit conserves energy and closes after one period") {
  const auto kep = LagrangianModel<double>::kepler();
  const auto s = kepler_initial_state<double>(0.1);
  const auto ref = reference_solve(kep, s, 2 * pi<double>(), 1e-12, 1e-14);
  const auto traj = ref.trajectory(kep);
  for (const auto& st : traj.states) CHECK(std::abs(st.E - s.E) <= 1e-9);
  const auto end = ref.state_at(kep, 2 * pi<double>());
  CHECK((end.q - s.q).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((end.p - s.p).lpNorm<Eigen::Infinity>() <= 1e-9);
  // Half a period later the body is at aphelion, r = 1 + e.
  CHECK(ref.state_at(kep, pi<double>()).q.norm() == doctest::Approx(1.1).epsilon(1e-9));
}

TEST_CASE("extended-precision reference reaches tight tolerances") {
  test::ExtendedDigits d(30);
  OdeRhs<Extended> f = [](const Extended&, const Vec<Extended>& y) { return y; };
  Vec<Extended> y0(1);
  y0 << Extended(1);
  const auto sol = dopri5_solve<Extended>(f, Extended(0), y0, Extended(1), Extended("1e-20"), Extended("1e-22"));
  CHECK(abs(sol.values().back()[0] - exp(Extended(1))) <= Extended("1e-18"));
}
