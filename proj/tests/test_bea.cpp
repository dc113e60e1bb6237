#include "support.hpp"
#include "varint/bea.hpp"
#include "varint/errors.hpp"

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

TEST_CASE("time profiles") {
  const auto tp = TimeProfile<double>::sinusoidal(0.3);
  for (double a : {-1.0, 0.0, 0.7, 2.5}) {
    CHECK(tp.t(a) == doctest::Approx(a + 0.3 * std::sin(a)));
    CHECK(tp.dt(a) == doctest::Approx(1 + 0.3 * std::cos(a)));
    CHECK(tp.ddt(a) == doctest::Approx(-0.3 * std::sin(a)));
    CHECK(tp.dddt(a) == doctest::Approx(-0.3 * std::cos(a)));
  }
  CHECK(TimeProfile<double>::linear(2.0).t(1.5) == 3.0);
  CHECK(TimeProfile<double>::identity().dt(9.0) == 1.0);
  CHECK_THROWS_AS(TimeProfile<double>::sinusoidal(1.0), ConfigError);
  CHECK_THROWS_AS(TimeProfile<double>(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS((Jet1D<double>{1, 0, 0, 0, 0, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((Jet1D<double>{1, 0, 1, 0, 0, -0.1}.validate()), ConfigError);
}

TEST_CASE("discrete residuals vanish at rest and along the discrete midpoint flow") {
  const auto osc = LagrangianModel<double>::oscillator(1.0, 1.0);
  const auto rest = discrete_residual<double>(osc, -0.1, vec1(0), 0.0, vec1(0), 0.1, vec1(0), 0.1);
  CHECK(rest.psi_EL[0] == 0.0);
  CHECK(rest.psi_E == 0.0);
  const auto traj =
      midpoint_fixed_run(osc, make_initial_state(osc, vec1(1), vec1(0.3)), 0.1, 0.25, SolverConfig<double>::defaults());
  REQUIRE(traj.states.size() == 4);
  const auto& s = traj.states;
  const auto r = discrete_residual<double>(osc, s[0].t, s[0].q, s[1].t, s[1].q, s[2].t, s[2].q, 0.1);
  CHECK(std::abs(r.psi_EL[0]) <= 1e-12);
}

TEST_CASE("modified equation and Lagrangian worked values") {
  const auto osc = LagrangianModel<double>::oscillator(1.0, 1.0);
  CHECK(modified_lagrangian_mod3<double>(osc, 1.0, 0.0, 1.0, 0.1) == doctest::Approx(-0.5 + 0.01 / 24).epsilon(1e-14));
  // Without the step correction both reduce to the reparametrized Lagrangian t'(½m(q'/t')² - V).
  const auto pen = LagrangianModel<double>::pendulum(1.3);
  const double q = 0.4, dq = 0.7, dt = 1.2;
  const double leading = dt * (0.5 * 1.3 * (dq / dt) * (dq / dt) - pen.potential(vec1(q)));
  CHECK(modified_lagrangian_mod3<double>(pen, q, dq, dt, 0.0) == doctest::Approx(leading).epsilon(1e-14));
  CHECK(meshed_lagrangian_order2<double>(pen, MeshedJet<double>{q, dq, -0.2, dt, 0.1, 0.0}) ==
        doctest::Approx(leading).epsilon(1e-14));
  // Δa = 0 and t = a leave Newton's equation.
  CHECK(modified_rhs_order2<double>(pen, Jet1D<double>{q, dq, 1, 0, 0, 0}) ==
        doctest::Approx(-pen.gradient(vec1(q))[0] / 1.3).epsilon(1e-14));
  CHECK_THROWS_AS(modified_rhs_order2<double>(LagrangianModel<double>::kepler(), Jet1D<double>{1, 0, 1, 0, 0, 0.1}),
                  UnsupportedOrderError);
}

TEST_CASE("modified oscillator frequency agrees with the midpoint frequency to fourth order") {
  const double k = 2.0, m = 0.5, w = std::sqrt(k / m);
  const auto fc = modified_frequency_check<double>(k, m, {0.05, 0.025});
  for (std::size_t i = 0; i < fc.delta_a.size(); ++i) {
    const double x = w * fc.delta_a[i] / 2;
    CHECK(fc.exact[i] == doctest::Approx(std::pow(2 / fc.delta_a[i] * std::atan(x), 2)).epsilon(1e-14));
    CHECK(fc.modified[i] == doctest::Approx(w * w * (1 - w * w * fc.delta_a[i] * fc.delta_a[i] / 6)).epsilon(1e-14));
    // exact = ω²(1 - 2x²/3 + 23x⁴/45 - ...)
    CHECK(fc.difference[i] / (w * w * std::pow(x, 4)) == doctest::Approx(23.0 / 45).epsilon(5e-3));
  }
}

TEST_CASE("second-order modified equation is the Euler-Lagrange equation of the modified Lagrangian") {
  test::ExtendedDigits digits(30);
  const auto pen = LagrangianModel<Extended>::pendulum(Extended("1.3"));
  const Extended d("1e-7");
  std::vector<Extended> steps, residuals;
  for (const char* da_text : {"0.2", "0.1", "0.05", "0.025"}) {
    const Extended da(da_text);
    auto L = [&](const Extended& q, const Extended& dq) {
      return modified_lagrangian_mod3<Extended>(pen, q, dq, Extended(1), da);
    };
    Extended worst(0);
    for (int trial = 0; trial < 5; ++trial) {
      const Extended q(test::uniform(-1, 1)), dq(test::uniform(-1, 1));
      const Extended ddq = modified_rhs_order2<Extended>(pen, Jet1D<Extended>{q, dq, 1, 0, 0, da});
      const Extended Lq = (L(q + d, dq) - L(q - d, dq)) / (2 * d);
      // d/da ∂L/∂q' = ∂²L/∂q'∂q q' + ∂²L/∂q'² q''
      const Extended Lvq = (L(q + d, dq + d) - L(q + d, dq - d) - L(q - d, dq + d) + L(q - d, dq - d)) / (4 * d * d);
      const Extended Lvv = (L(q, dq + d) - 2 * L(q, dq) + L(q, dq - d)) / (d * d);
      const Extended r = abs(Lq - Lvq * dq - Lvv * ddq);
      if (r > worst) worst = r;
    }
    steps.push_back(da);
    residuals.push_back(worst);
  }
  CHECK(residuals.back() <= Extended("1e-4"));
  CHECK(loglog_slope(steps, residuals) >= Extended("3.8"));
}

TEST_CASE("residual order estimates") {
  const auto osc = LagrangianModel<double>::oscillator(1.0, 1.0);
  OrderOptions<double> opt;
  opt.q0 = 1.0;
  const std::vector<double> steps{0.1, 0.05, 0.025, 0.0125};
  const auto off = residual_order_estimate(osc, TimeProfile<double>::identity(), false, steps, opt);
  const auto on = residual_order_estimate(osc, TimeProfile<double>::identity(), true, steps, opt);
  CHECK(off.slope == doctest::Approx(3.0).epsilon(0.1));
  CHECK(on.slope == doctest::Approx(5.0).epsilon(0.06));
  CHECK(off.psi_ratio == doctest::Approx(1.0).epsilon(0.05));
  for (std::size_t i = 0; i < steps.size(); ++i) CHECK(on.residual_EL[i] < off.residual_EL[i]);
  CHECK_THROWS_AS(residual_order_estimate(osc, TimeProfile<double>::identity(), false, {0.1, 0.05, 0.025}, opt),
                  ConfigError);
  CHECK_THROWS_AS(residual_order_estimate(osc, TimeProfile<double>::identity(), false, {0.1, 0.2, 0.025, 0.01}, opt),
                  ConfigError);
}

TEST_CASE("log-log slope") {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3 * v * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(loglog_slope<double>({1.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(loglog_slope<double>({1.0, 2.0}, {1.0, 0.0}), DomainError);
}

TEST_CASE("reparametrized solutions follow the physical ones") {
  const auto kep = LagrangianModel<double>::kepler();
  const auto s = kepler_initial_state<double>(0.3);
  CHECK(reparametrization_check(kep, TimeProfile<double>::linear(2.0), s, 2.0, 1e-12, 1e-14) <= 1e-8);
  const auto osc = LagrangianModel<double>::oscillator(1.0, 1.0);
  const auto s1 = make_initial_state(osc, vec1(1), vec1(0));
  CHECK(reparametrization_check(osc, TimeProfile<double>::sinusoidal(0.5), s1, 6.0, 1e-12, 1e-14) <= 1e-8);
}
