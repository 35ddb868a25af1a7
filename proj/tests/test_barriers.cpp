#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "nlphase/barriers.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/minimizer.hpp"

using namespace nlphase;

TEST_CASE("psi and d profiles") {
  const double R = 3.0;
  CHECK(eval_psi(R, 0.0) == -1.0);
  CHECK(eval_psi(R, 4.0) == -1.0);
  CHECK(eval_psi(R, 4.5) == 0.0);
  CHECK(eval_psi(R, 5.0) == 1.0);
  CHECK(eval_psi(R, 9.0) == 1.0);
  CHECK(eval_psi(R, Point{3.0, 4.0}) == 1.0);
  CHECK(eval_d(R, 0.0) == 3.0);
  CHECK(eval_d(R, 2.5) == 1.0);
  CHECK(eval_d(R, 7.0) == 1.0);
}

TEST_CASE("psi field carries the barrier exterior") {
  const Field f = make_psi_field(2.0, 0.25, 1);
  CHECK(f.grid.box_radius() == doctest::Approx(4.0));
  CHECK(f.exterior == Exterior::psi(2.0));
  CHECK(f.values[f.grid.index(0, 0)] == -1.0);
  CHECK(f.values[f.grid.index(14, 0)] == doctest::Approx(0.0));
}

TEST_CASE("psi obeys its Lipschitz bound") {
  for (int n : {1, 2}) {
    for (double R : {1.0, 2.0, 8.0}) {
      const auto rep = lipschitz_bound_check(R, 4000, make_energy_params(0.25, 2.0, n), 3);
      CHECK(rep.pairs == 4000);
      CHECK(rep.worst_deficit <= 1e-12);
    }
  }
  CHECK_THROWS_AS(lipschitz_bound_check(2.0, 50, make_energy_params(0.25, 2.0, 1)), ConfigError);
}

TEST_CASE("regimes partition sp") {
  testing::Gen gen(6);
  for (int t = 0; t < 200; ++t) {
    const double s = gen.uniform(0.01, 0.99);
    const double p = gen.uniform(1.0, 3.0);
    const Regime r = regime_of(s, p);
    if (s * p < 1.0 - 1e-9) CHECK(r == Regime::Sub);
    if (s * p > 1.0 + 1e-9) CHECK(r == Regime::Super);
  }
  CHECK(regime_of(0.5, 2.0) == Regime::Critical);
  CHECK(std::string(regime_name(Regime::Critical)) == "critical");
}

TEST_CASE("regime envelopes") {
  CHECK(regime_bound(4.0, 0.25, 2.0, 1) == doctest::Approx(4.0 * std::sqrt(4.0) / 0.5));
  CHECK(regime_bound(4.0, 0.5, 2.0, 1) == doctest::Approx(2.0 * std::log(4.0)));
  CHECK(regime_bound(4.0, 0.75, 2.0, 1) == doctest::Approx(1.0 / 0.75 / 0.5));
  CHECK(regime_bound(4.0, 0.25, 2.0, 2, 3.0) == doctest::Approx(3.0 * std::pow(4.0, 1.5) / 0.25 / 0.5));
}

TEST_CASE("barrier sweep rows") {
  const auto spec = prototype_potential(2.0);
  const auto sweep = barrier_energy_sweep({2.0, 4.0, 8.0}, make_energy_params(0.25, 2.0, 1), spec, 0.125);
  REQUIRE(sweep.rows.size() == 3);
  CHECK(sweep.regime == Regime::Sub);
  for (const auto& row : sweep.rows) {
    CHECK_FALSE(row.diverged);
    // W(ψ) lives on the ramp annulus of measure 2 (plus a cell); W <= 1/4.
    CHECK(row.energy_potential <= 0.25 * (2.0 + 0.125) + 1e-12);
    CHECK(row.energy_kinetic > 0.0);
  }
  CHECK(sweep.rows[2].energy_kinetic > sweep.rows[0].energy_kinetic);
  CHECK(sweep.slope > 0.3);
  CHECK_THROWS_AS(barrier_energy_sweep({2.0}, make_energy_params(0.25, 2.0, 1), spec, 0.5), ConfigError);
  CHECK_THROWS_AS(barrier_energy_sweep({1.0}, make_energy_params(0.25, 2.0, 1), spec, 0.125), DomainError);
}

TEST_CASE("barrier energy stays bounded as s grows") {
  const auto spec = prototype_potential(2.0);
  const double h = 0.125;
  double lo = 1e300, hi = 0.0;
  for (double s : {0.6, 0.8, 0.9, 0.95}) {
    const auto sweep = barrier_energy_sweep({4.0}, make_energy_params(s, 2.0, 1), spec, h);
    const double e = sweep.rows[0].energy_kinetic + sweep.rows[0].energy_potential;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(hi / lo < 3.0);
}

TEST_CASE("minimizer energy bound") {
  const auto spec = prototype_potential(2.0);
  const auto params = make_energy_params(0.25, 2.0, 1);
  const double R = 2.0;
  testing::Gen gen(17);
  Field u0 = gen.random_field(1, 0.125, R + 2.0, Exterior::constant(1.0));
  const auto res = minimize(u0, R + 2.0, params, spec);
  CHECK(res.status == MinimizeStatus::Converged);
  const auto chk = minimizer_energy_bound_check(res.field, R, params, spec, true);
  CHECK(chk.status == CheckStatus::Pass);
  CHECK(chk.margin >= 0.0);
  CHECK(chk.rhs == doctest::Approx(chk.barrier + chk.cross));
  const auto inc = minimizer_energy_bound_check(res.field, R, params, spec, false);
  CHECK(inc.status == CheckStatus::Inconclusive);
}
