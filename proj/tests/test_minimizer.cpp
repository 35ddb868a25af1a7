#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "nlphase/analysis.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/minimizer.hpp"

using namespace nlphase;

namespace {

// Largest |central difference - gradient| over Ω cells whose value is at
// least 0.05 away from ±1, relative to max |gradient|.
double gradient_error(const Field& u, double omega, const EnergyParams& params, const PotentialSpec& spec) {
  const DiscreteEnergy e(u, omega, params, spec);
  std::vector<double> g(u.values.size());
  e.gradient(u.values, g);
  double scale = 0.0;
  for (double x : g) scale = std::max(scale, std::abs(x));
  double worst = 0.0;
  const double step = 1e-6;
  for (std::size_t i : e.omega_cells()) {
    if (std::abs(u.values[i]) > 0.95) continue;
    auto plus = u.values, minus = u.values;
    plus[i] += step;
    minus[i] -= step;
    const double fd = (e.value(plus) - e.value(minus)) / (2 * step);
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("minimizer config validation") {
  MinimizeConfig cfg;
  cfg.backtrack = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("gradient matches central differences") {
  testing::Gen gen(31);
  const auto spec = prototype_potential(2.0);
  struct Case {
    int n;
    double s, p;
    double h;
    bool smooth;
  };
  for (const Case c : {Case{1, 0.3, 2.0, 0.1, false}, Case{1, 0.75, 2.0, 0.1, true}, Case{2, 0.3, 2.0, 0.2, false},
                       Case{1, 0.4, 1.5, 0.1, false}}) {
    const auto ext = gen.coin() ? Exterior::two_phase() : Exterior::constant(gen.uniform(-1, 1));
    const Field u = c.smooth ? gen.smooth_field(c.n, c.h, 1.0, ext) : gen.random_field(c.n, c.h, 1.0, ext);
    CAPTURE(c.n);
    CAPTURE(c.s);
    CHECK(gradient_error(u, 1.0, make_energy_params(c.s, c.p, c.n), spec) < 1e-5);
  }
}

TEST_CASE("constant state gradient is the potential slope") {
  const auto spec = prototype_potential(2.0);
  const Grid g = Grid::centered(1, 0.125, 1.0);
  const Field u = make_field(g, [](const Point&) { return 0.3; }, Exterior::constant(0.3));
  const auto grad = energy_gradient(u, 1.0, make_energy_params(0.4, 2.0, 1), spec);
  for (double x : grad) CHECK(x == doctest::Approx(eval_potential_derivative(spec, 0.3) * g.h).epsilon(1e-9));
}

TEST_CASE("radially symmetric fields have symmetric gradients") {
  const auto spec = prototype_potential(2.0);
  const Grid g = Grid::centered(2, 0.125, 1.0);
  const Field u = make_field(g, [](const Point& x) { return std::cos(2 * norm(x)); }, Exterior::constant(-0.4));
  const auto grad = energy_gradient(u, 1.0, make_energy_params(0.3, 2.0, 2), spec);
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b) {
      const double ref = grad[g.index(a, b)];
      CHECK(grad[g.index(b, a)] == doctest::Approx(ref).epsilon(1e-9).scale(1e-12));
      CHECK(grad[g.index(-a, b)] == doctest::Approx(ref).epsilon(1e-9).scale(1e-12));
    }
}

TEST_CASE("descent, feasibility and frozen exterior") {
  testing::Gen gen(41);
  const auto spec = prototype_potential(2.0);
  const auto params = make_energy_params(0.4, 2.0, 2);
  Field u0 = gen.random_field(2, 0.2, 1.4, Exterior::two_phase());
  const auto res = minimize(u0, 1.0, params, spec);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i].energy < res.trace[i - 1].energy);
  for (double v : res.field.values) CHECK(std::abs(v) <= 1.0);
  for (std::size_t i = 0; i < u0.values.size(); ++i)
    if (norm(u0.grid.center(i)) > 1.0 + 1e-9) CHECK(res.field.values[i] == u0.values[i]);
  CHECK(res.energy < total_energy(u0, 1.0, params, spec).total);
}

TEST_CASE("exterior -1 drives the minimizer to the pure phase") {
  testing::Gen gen(43);
  const auto spec = prototype_potential(2.0);
  const Field u0 = gen.random_field(1, 1.0 / 16, 1.0, Exterior::constant(-1.0));
  const auto res = minimize(u0, 1.0, make_energy_params(0.3, 2.0, 1), spec);
  CHECK(res.status == MinimizeStatus::Converged);
  CHECK(res.energy < 1e-8);
}

TEST_CASE("certificate input checks") {
  const auto spec = prototype_potential(2.0);
  const auto params = make_energy_params(0.3, 2.0, 1);
  const Grid g = Grid::centered(1, 0.125, 1.5);
  const Field u = make_field(g, [](const Point&) { return -1.0; }, Exterior::constant(-1));
  Field other_grid = make_field(Grid::centered(1, 0.25, 1.5), [](const Point&) { return -1.0; }, Exterior::constant(-1));
  Field other_ext = u;
  other_ext.exterior = Exterior::constant(0.0);
  Field outside = u;
  outside.values.back() = 0.0;
  for (const Field& bad : {other_grid, other_ext, outside})
    CHECK_THROWS_AS(certify_epsilon(u, 1.0, params, spec, 0.0, {{"bad", bad}}), InputError);
  CHECK_THROWS_AS(certify_epsilon(u, 1.0, params, spec, -1.0, {}), DomainError);
  CHECK_THROWS_AS(certify_Q(u, 1.0, params, spec, 0.5, {}), DomainError);
}

TEST_CASE("Q certificate implies the epsilon certificate") {
  testing::Gen gen(47);
  const auto spec = prototype_potential(2.0);
  const auto params = make_energy_params(0.3, 2.0, 1);
  const Field u0 = gen.random_field(1, 0.125, 2.0, Exterior::two_phase());
  const auto res = minimize(u0, 1.5, params, spec);
  const auto suite = build_candidate_suite(res.field, 1.5, params, spec);
  CHECK(suite.size() >= 10);
  CHECK(suite.front().name == "self");
  const auto q = certify_Q(res.field, 1.5, params, spec, 1.5, {{1.5, suite}});
  CHECK(q.passed);
  CHECK(q.implied_epsilon == doctest::Approx(0.5 * q.E0));
  const auto e = certify_epsilon(res.field, 1.5, params, spec, q.implied_epsilon, suite);
  CHECK(e.passed);
  CHECK(e.candidates_tested == static_cast<int>(suite.size()));
}

TEST_CASE("a non-minimizer fails its certificate") {
  const auto spec = prototype_potential(2.0);
  const auto params = make_energy_params(0.3, 2.0, 1);
  const Grid g = Grid::centered(1, 0.125, 1.5);
  const Field u = make_field(g, [](const Point& x) { return std::abs(x[0]) <= 1.0 ? 0.0 : -1.0; },
                             Exterior::constant(-1));
  const auto suite = build_candidate_suite(u, 1.0, params, spec);
  const auto e = certify_epsilon(u, 1.0, params, spec, 0.0, suite);
  CHECK_FALSE(e.passed);
  CHECK(e.worst_violation > 0.0);
}

TEST_CASE("indicator energy grows like eta^(1-sp)") {
  const auto params = make_energy_params(0.25, 2.0, 1);
  std::vector<double> etas, ks;
  for (double eta : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}) {
    const Field u = indicator_field(eta, 1.0 / 256, 1, 1.0);
    etas.push_back(eta);
    ks.push_back(kinetic_energy(u, 1.0, params).kinetic());
  }
  CHECK(fit_exponent(etas, ks).slope == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("bump field profile") {
  const Field u = bump_field(0.5, 1.0 / 64, 1, 1.0);
  CHECK(u.values[u.grid.index(0, 0)] == 1.0);
  CHECK(u.values[u.grid.index(40, 0)] == -1.0);
  CHECK(u.values[u.grid.index(16, 0)] == doctest::Approx(std::log(2.0) - 1.0));
  CHECK_THROWS_AS(bump_field(0.0, 0.1, 1), DomainError);
}
