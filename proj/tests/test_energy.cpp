#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "generators.hpp"
#include "nlphase/energy.hpp"
#include "nlphase/errors.hpp"

using namespace nlphase;
using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

// ∫_{|y| > R} |x - y|^(-2-σ) dy at |x| = rho, in polar coordinates around the
// origin with |y| = R / t, which leaves R^(-σ) t^(σ-1) ∫ (1 + w^2 - 2w cos φ)^(-1-σ/2) dφ
// with w = rho t / R.
double kernel_mass_2d_oracle(double rho, double R, double sigma) {
  tanh_sinh<double> outer;
  auto radial = [&](double t) {
    const double w = rho * t / R;
    auto ang = [&](double phi) { return std::pow(1.0 + w * w - 2.0 * w * std::cos(phi), -(2.0 + sigma) / 2.0); };
    const double a = 2.0 * gauss_kronrod<double, 61>::integrate(ang, 0.0, M_PI, 15, 1e-12);
    return a * std::pow(R, -sigma) * std::pow(t, sigma - 1.0);
  };
  return outer.integrate(radial, 0.0, 1.0);
}

// Exact seminorm of the indicator of an interval of length l against 0.
double interval_seminorm(double l, double sigma) { return 4.0 * std::pow(l, 1.0 - sigma) / (sigma * (1.0 - sigma)); }

}  // namespace

TEST_CASE("K_{n,p} closed values") {
  CHECK(knp_constant(1, 2.0) == 2.0);
  CHECK(knp_constant(1, 1.3) == 2.0);
  CHECK(knp_constant(2, 2.0) == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(knp_constant(3, 2.0) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
  for (double p : {1.5, 2.0, 3.0}) {
    // ∫_0^{2π} |cos θ|^p = 2 B((p+1)/2, 1/2)
    const double ref = 2.0 * std::beta((p + 1.0) / 2.0, 0.5);
    CHECK(knp_constant(2, p) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(knp_closed_form(2, p) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("interval indicator seminorm is exact in 1D") {
  for (double sigma : {0.2, 0.5, 0.8}) {
    for (int k : {0, 2, 5}) {
      const double h = 1.0 / 16;
      const double a = (k + 0.5) * h;
      const Grid g = Grid::centered(1, h, 1.0);
      const Field u = make_field(g, [a](const Point& x) { return std::fabs(x[0]) < a ? 1.0 : 0.0; },
                                 Exterior::constant(0.0));
      const auto params = make_energy_params(sigma / 2.0, 2.0, 1);
      CAPTURE(sigma);
      CAPTURE(k);
      CHECK(full_seminorm(u, params) == doctest::Approx(interval_seminorm(2 * a, sigma)).epsilon(1e-9));
    }
  }
}

TEST_CASE("interaction_L in 1D matches the closed form") {
  for (double sigma : {0.3, 0.7, 1.5}) {
    const auto params = make_energy_params(sigma / 2.0, 2.0, 1);
    for (double r2 : {0.5, 2.0}) {
      for (double r1 : {0.1, 0.5}) {
        const double ref = 2.0 * (std::pow(2 * r2 + r1, 1 - sigma) - std::pow(r1, 1 - sigma)) / (sigma * (1 - sigma));
        CHECK(interaction_L(r2, r1, params) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("exterior kernel mass in 2D against an independent quadrature") {
  for (double sigma : {0.3, 0.8}) {
    for (double rho : {0.0, 0.4, 0.75}) {
      CAPTURE(sigma);
      CAPTURE(rho);
      CHECK(exterior_kernel_mass(rho, 1.0, sigma, 2) == doctest::Approx(kernel_mass_2d_oracle(rho, 1.0, sigma)).epsilon(1e-6));
    }
  }
}

TEST_CASE("interaction_L in 2D against an independent quadrature") {
  const double sigma = 0.6;
  const auto params = make_energy_params(0.3, 2.0, 2);
  auto ring = [&](double rho) { return 2.0 * M_PI * rho * kernel_mass_2d_oracle(rho, 2.0, sigma); };
  const double ref = gauss<double, 20>::integrate(ring, 0.0, 1.0);
  CHECK(interaction_L(1.0, 1.0, params) == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("interaction_L decreases as the gap opens") {
  const auto params = make_energy_params(0.25, 2.0, 2);
  double last = interaction_L(1.0, 0.05, params);
  for (double r1 : {0.1, 0.2, 0.4, 0.8}) {
    const double v = interaction_L(1.0, r1, params);
    CHECK(v < last);
    last = v;
  }
}

TEST_CASE("three-regime lower bound") {
  CHECK(interaction_delta(1, 2.0) == 0.5);
  CHECK(interaction_delta(2, 2.0) == 0.25);
  CHECK(interaction_delta(1, 1.5) == 0.5);
  CHECK(interaction_delta(2, 3.0) == 0.125);
  CHECK_THROWS_AS(interaction_lower_bound(2.0, 1.0, 0.25, 2.0, 1), DomainError);
  testing::Gen gen(4);
  for (int t = 0; t < 20; ++t) {
    const int n = gen.integer(1, 2);
    const double s = gen.coin() ? gen.uniform(0.05, 0.45) : gen.uniform(0.55, 0.95);
    const double R = gen.uniform(1.0, 4.0);
    const double r = gen.uniform(0.05, 0.95) * interaction_delta(n, 2.0) * R;
    const auto params = make_energy_params(s, 2.0, n);
    CAPTURE(n);
    CAPTURE(s);
    CHECK(interaction_L(R, r, params) >= interaction_lower_bound(R, r, s, 2.0, n));
  }
}

TEST_CASE("cone bound sits below the kernel mass") {
  testing::Gen gen(8);
  for (int t = 0; t < 40; ++t) {
    const int n = gen.integer(1, 2);
    const double sigma = gen.uniform(0.1, 1.8);
    const double R = gen.uniform(0.5, 3.0);
    const double x = gen.uniform(0.0, 0.95) * R;
    const double m = gen.uniform(0.2, 2.0);
    CHECK(cone_lower_bound(x, R, sigma, n, m) <= exterior_kernel_mass(x, R, sigma, n));
  }
  CHECK(exterior_kernel_mass(0.0, 1.0, 0.5, 1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(cone_lower_bound(1.0, 1.0, 0.5, 1, 1.0), DomainError);
}

TEST_CASE("2D pair weights are symmetric and approach the point kernel") {
  const double sigma = 0.5;
  CHECK(unit_pair_weight_2d(2, 1, sigma) == doctest::Approx(unit_pair_weight_2d(1, 2, sigma)).epsilon(1e-12));
  CHECK(unit_pair_weight_2d(-3, 0, sigma) == doctest::Approx(unit_pair_weight_2d(3, 0, sigma)).epsilon(1e-12));
  const double far = unit_pair_weight_2d(20, 0, sigma);
  CHECK(far == doctest::Approx(std::pow(20.0, -2.0 - sigma)).epsilon(0.01));
  CHECK(unit_pair_weight_2d(1, 0, sigma) > unit_pair_weight_2d(1, 1, sigma));
}

TEST_CASE("kinetic energy scales like h^(n - sp)") {
  testing::Gen gen(13);
  for (int n : {1, 2}) {
    const Field u = gen.random_field(n, 0.125, 1.0, Exterior::constant(-0.5));
    Field v = u;
    const double lam = 2.0;
    v.grid.h *= lam;
    const auto params = make_energy_params(0.35, 2.0, n);
    const auto a = kinetic_energy(u, 1.0, params);
    const auto b = kinetic_energy(v, lam, params);
    CHECK(b.kinetic() == doctest::Approx(std::pow(lam, n - 0.7) * a.kinetic()).epsilon(1e-9));
  }
}

TEST_CASE("kinetic energy is invariant under u -> -u") {
  testing::Gen gen(14);
  const Field u = gen.random_field(2, 0.2, 1.0, Exterior::constant(0.3));
  Field v = u;
  for (double& x : v.values) x = -x;
  v.exterior = Exterior::constant(-0.3);
  const auto params = make_energy_params(0.4, 1.5, 2);
  CHECK(kinetic_energy(v, 1.0, params).kinetic() == doctest::Approx(kinetic_energy(u, 1.0, params).kinetic()).epsilon(1e-12));
}

TEST_CASE("energies do not depend on the thread count") {
  testing::Gen gen(15);
  const Field u = gen.random_field(2, 0.1, 1.0, Exterior::two_phase());
  auto params = make_energy_params(0.3, 2.0, 2);
  const auto spec = prototype_potential(2.0);
  params.threads = 1;
  const auto a = total_energy(u, 1.0, params, spec);
  params.threads = 4;
  const auto b = total_energy(u, 1.0, params, spec);
  CHECK(a.total == b.total);
  CHECK(a.kinetic_cross == b.kinetic_cross);
}

TEST_CASE("constant states") {
  const auto spec = prototype_potential(2.0);
  const Grid g = Grid::centered(1, 1.0 / 64, 1.0);
  const Field minus = make_field(g, [](const Point&) { return -1.0; }, Exterior::constant(-1));
  const auto params = make_energy_params(0.75, 2.0, 1);
  CHECK(total_energy(minus, 1.0, params, spec).total == 0.0);
  const Field zero = make_field(g, [](const Point&) { return 0.0; }, Exterior::constant(0));
  const auto e = total_energy(zero, 1.0, params, spec);
  CHECK(e.kinetic() == 0.0);
  CHECK(e.potential == doctest::Approx((2.0 + g.h) * 0.25));
}

TEST_CASE("jumps diverge for sp >= 1, smooth fields do not") {
  const Grid g = Grid::centered(1, 1.0 / 32, 1.0);
  const auto params = make_energy_params(0.75, 2.0, 1);
  const Field jump = make_field(g, [](const Point& x) { return x[0] > 0 ? 1.0 : -1.0; }, Exterior::two_phase());
  CHECK(kinetic_energy(jump, 1.0, params).diverged);
  const Field smooth = make_field(g, [](const Point& x) { return std::tanh(x[0]); }, Exterior::constant(0.0));
  Field s2 = smooth;
  s2.exterior = Exterior::two_phase();
  s2.profile = [](const Point& x) { return std::sin(0.5 * M_PI * x[0]); };
  s2.values = make_field(g, s2.profile, s2.exterior).values;
  CHECK_FALSE(kinetic_energy(s2, 1.0, params).diverged);
}

TEST_CASE("2D rejects sp >= 1") {
  auto params = make_energy_params(0.6, 2.0, 2);
  CHECK_THROWS_AS(params.validate(), DomainError);
  params.pair_model = PairModel::PiecewiseConstant;
  CHECK_THROWS_AS(params.validate(), DomainError);
}

TEST_CASE("local energy of a linear ramp") {
  const auto spec = zero_potential(2.0);
  const Grid g = Grid::centered(1, 1.0 / 64, 2.0);
  const Field u = make_field(g, [](const Point& x) { return 0.5 * x[0]; }, Exterior::constant(0));
  // (K_{1,2} / 4) * |u'|^2 * |Ω| = 0.5 * 0.25 * (2 + h)
  CHECK(local_energy(u, 1.0, 2.0, spec) == doctest::Approx(0.125 * (2.0 + g.h)).epsilon(1e-9));
}

TEST_CASE("c_hat_p branches") {
  CHECK(c_hat_p(2.0) == 0.5);
  CHECK(c_hat_p(3.0) == 0.25);
  CHECK(c_hat_p(1.5) == doctest::Approx(3 * 1.5 * 0.5 / std::pow(4.0, 2.5)));
}
