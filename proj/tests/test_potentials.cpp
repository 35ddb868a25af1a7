#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/potentials.hpp"

using namespace nlphase;

TEST_CASE("well order") {
  CHECK(well_order(2.0) == 2);
  CHECK(well_order(3.0) == 3);
  CHECK(well_order(2.5) == 3);
  CHECK(well_order(2.01) == 3);
  CHECK(is_integer_exponent(4.0));
  CHECK_FALSE(is_integer_exponent(2.5));
}

TEST_CASE("prototype values in both normalizations") {
  const auto scaled = prototype_potential(2.0, Normalization::Scaled);
  const auto app = prototype_potential(2.0, Normalization::Plain);
  CHECK(eval_potential(scaled, 0.0) == doctest::Approx(0.25));
  CHECK(eval_potential(app, 0.0) == doctest::Approx(1.0));
  CHECK(eval_potential(app, 1.0) == 0.0);
  CHECK(eval_potential(app, -1.0) == 0.0);
  CHECK(eval_potential_derivative(app, 0.5) == doctest::Approx(-4.0 * 0.5 * 0.75));
  CHECK_THROWS_AS(eval_potential(app, 1.5), DomainError);
}

TEST_CASE("low order polynomials by hand") {
  // d/dx (1-x^2)^2 = -4x, d^2/dx^2 (1-x^2)^2 = 12x^2 - 4
  for (double x : {-0.7, 0.0, 0.3, 1.0}) {
    CHECK(eval_P(2.0, 1, x) == doctest::Approx(-4.0 * x));
    CHECK(eval_P(2.0, 2, x) == doctest::Approx(12.0 * x * x - 4.0));
  }
  // d^3/dx^3 (1-x^2)^3 = -120x^3 + 72x
  for (double x : {-0.9, 0.2, 0.6}) CHECK(eval_P(3.0, 3, x) == doctest::Approx(-120.0 * x * x * x + 72.0 * x));
}

TEST_CASE("exact and floating recursion agree") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = gen.integer(2, 6);
    const int k = gen.integer(1, m);
    const auto pe = recursive_polynomial_exact(Rational(m), k);
    const auto pd = recursive_polynomial(static_cast<double>(m), k);
    const double x = gen.uniform(-1.0, 1.0);
    CHECK(static_cast<double>(pe(Rational(x))) == doctest::Approx(pd(x)).epsilon(1e-12));
  }
}

TEST_CASE("derivative identity holds for random integer orders") {
  testing::Gen gen(5);
  std::vector<double> xs;
  for (int i = 0; i < 41; ++i) xs.push_back(-0.98 + 0.049 * i);
  for (int trial = 0; trial < 12; ++trial) {
    const int m = gen.integer(2, 4);
    const int k = gen.integer(1, m);
    const auto r = check_derivative_identity(m, k, xs);
    CAPTURE(m);
    CAPTURE(k);
    CHECK(r.points_used > 20);
    CHECK(r.max_residual <= 1e-6);
  }
}

TEST_CASE("sandwich bounds at random points") {
  testing::Gen gen(3);
  for (double m : {2.0, 2.5, 3.0}) {
    for (auto norm : {Normalization::Scaled, Normalization::Plain}) {
      const auto spec = prototype_potential(m, norm);
      const double mu = spec.theta;
      const double lam = lower_bound_constant(spec, mu);
      CHECK(lam > 0.0);
      for (int i = 0; i < 500; ++i) {
        const double x = gen.uniform(-1.0, 1.0);
        const double w = eval_potential(spec, x);
        const double g = std::pow(1.0 + x, m);
        CHECK(w <= spec.Lambda * g * (1.0 + 1e-12) + 1e-15);
        if (x <= mu) CHECK(lam * g <= w * (1.0 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("calibrated well condition") {
  for (double m : {2.0, 2.5, 3.0}) {
    const auto cal = calibrate_c1_q(m, 0.5);
    CAPTURE(m);
    CHECK(cal.q > 0.0);
    CHECK(cal.q < 1.0);
    CHECK(cal.k == well_order(m));
    const double scaled = cal.q * 1048576.0;
    CHECK(scaled == std::floor(scaled));
    const auto spec = prototype_potential(m, Normalization::Plain, 0.5);
    CHECK(check_well_condition(spec, 120).holds);
  }
}

TEST_CASE("well condition fails when c1 is inflated") {
  auto spec = prototype_potential(2.0, Normalization::Plain, 0.5);
  spec.c1 *= 50.0;
  CHECK_FALSE(check_well_condition(spec, 60).holds);
}

TEST_CASE("custom hook replaces the formula") {
  PotentialSpec spec = zero_potential();
  CHECK(eval_potential(spec, 0.3) == 0.0);
  spec.custom = [](double x) { return (1 - x) * (1 - x); };
  spec.custom_derivative = [](double x) { return -2 * (1 - x); };
  CHECK(eval_potential(spec, -1.0) == doctest::Approx(4.0));
  CHECK(eval_potential_derivative(spec, 0.0) == doctest::Approx(-2.0));
}
