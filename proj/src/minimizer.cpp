#include "nlphase/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nlphase/errors.hpp"
#include "nlphase/format.hpp"
#include "nlphase/parallel.hpp"

namespace nlphase {

void MinimizeConfig::validate() const {
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be > 0");
  if (!(step_init > 0.0)) throw ConfigError("step_init must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtracking factor must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("armijo constant must lie in (0, 1)");
  if (!(min_step > 0.0)) throw ConfigError("min_step must be > 0");
}

const char* status_name(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::Converged: return "converged";
    case MinimizeStatus::MaxIters: return "max_iters";
    case MinimizeStatus::Stagnated: return "stagnated";
  }
  return "?";
}

// --- DiscreteEnergy -----------------------------------------------------------------

DiscreteEnergy::DiscreteEnergy(const Field& u, double omega_radius, const EnergyParams& params,
                               const PotentialSpec& spec)
    : op_(u, omega_radius, params), spec_(spec), one_minus_s_(1.0 - params.s) {}

double DiscreteEnergy::value(std::span<const double> values) const {
  const auto [interior, cross] = op_.evaluate(values);
  const auto& cells = op_.omega_cells();
  std::vector<double> pot(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) pot[i] = eval_potential(spec_, values[cells[i]]);
  return one_minus_s_ * (interior + cross) + ordered_sum(pot) * op_.grid().cell_volume();
}

void DiscreteEnergy::gradient(std::span<const double> values, std::span<double> grad) const {
  op_.gradient(values, grad);
  const double vol = op_.grid().cell_volume();
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= one_minus_s_;
  for (std::size_t idx : op_.omega_cells()) grad[idx] += eval_potential_derivative(spec_, values[idx]) * vol;
}

std::vector<double> energy_gradient(const Field& u, double omega_radius, const EnergyParams& params,
                                    const PotentialSpec& spec) {
  const DiscreteEnergy e(u, omega_radius, params, spec);
  std::vector<double> g(u.values.size(), 0.0);
  e.gradient(u.values, g);
  return g;
}

// --- Projected gradient -------------------------------------------------------------

MinimizeResult minimize(const Field& u0, double omega_radius, const EnergyParams& params,
                        const PotentialSpec& spec, const MinimizeConfig& cfg) {
  cfg.validate();
  EnergyParams local = params;
  if (cfg.threads > 0) local.threads = cfg.threads;
  const DiscreteEnergy energy(u0, omega_radius, local, spec);
  const auto& cells = energy.omega_cells();
  const double vol = u0.grid.cell_volume();

  std::vector<double> x = u0.values;
  for (std::size_t idx : cells) x[idx] = std::clamp(x[idx], -1.0, 1.0);
  std::vector<double> g(x.size(), 0.0), g_new(x.size(), 0.0), trial(x);

  double f = energy.value(x);
  energy.gradient(x, g);
  auto projected_norm = [&](const std::vector<double>& at, const std::vector<double>& grad) {
    double worst = 0.0;
    for (std::size_t idx : cells)
      worst = std::max(worst, std::abs(std::clamp(at[idx] - grad[idx] / vol, -1.0, 1.0) - at[idx]));
    return worst;
  };

  MinimizeResult res;
  double pg = projected_norm(x, g);
  res.trace.push_back({0, f, pg, 0.0});
  double alpha = cfg.step_init;
  res.status = MinimizeStatus::MaxIters;
  int iter = 0;
  while (true) {
    if (pg <= cfg.grad_tol) {
      res.status = MinimizeStatus::Converged;
      break;
    }
    if (iter >= cfg.max_iters) break;

    bool accepted = false;
    double f_new = f;
    double a = alpha;
    while (a >= cfg.min_step) {
      double descent = 0.0;
      bool moved = false;
      for (std::size_t idx : cells) {
        trial[idx] = std::clamp(x[idx] - a * g[idx] / vol, -1.0, 1.0);
        const double dx = trial[idx] - x[idx];
        if (dx != 0.0) moved = true;
        descent += g[idx] * dx;
      }
      if (!moved) break;
      f_new = energy.value(trial);
      if (f_new < f && f_new <= f + cfg.armijo * descent) {
        accepted = true;
        break;
      }
      a *= cfg.backtrack;
    }
    if (!accepted) {
      res.status = MinimizeStatus::Stagnated;
      break;
    }

    energy.gradient(trial, g_new);
    double ss = 0.0, sy = 0.0;
    for (std::size_t idx : cells) {
      const double sd = trial[idx] - x[idx];
      const double yd = (g_new[idx] - g[idx]) / vol;
      ss += sd * sd;
      sy += sd * yd;
    }
    for (std::size_t idx : cells) x[idx] = trial[idx];
    g.swap(g_new);
    f = f_new;
    ++iter;
    pg = projected_norm(x, g);
    res.trace.push_back({iter, f, pg, a});
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : cfg.step_init;
  }

  res.iterations = iter;
  res.energy = f;
  res.grad_norm = pg;
  res.field = u0;
  res.field.values = std::move(x);
  res.field.profile = nullptr;
  res.field.clamp_count = 0;
  return res;
}

// --- Certification ------------------------------------------------------------------

namespace {

std::vector<std::size_t> cells_in_ball(const Grid& g, double radius) {
  std::vector<std::size_t> out;
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (static_cast<double>(g.radius2_units(i)) * g.h * g.h <= r2) out.push_back(i);
  return out;
}

void check_compatible(const Field& u, const Candidate& c, double radius) {
  const Field& v = c.field;
  if (v.grid.n != u.grid.n || v.grid.h != u.grid.h || v.grid.cells != u.grid.cells)
    throw InputError("candidate '" + c.name + "' lives on a different grid");
  if (!(v.exterior == u.exterior)) throw InputError("candidate '" + c.name + "' has different exterior data");
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    if (static_cast<double>(u.grid.radius2_units(i)) * u.grid.h * u.grid.h <= r2) continue;
    if (v.values[i] != u.values[i])
      throw InputError("candidate '" + c.name + "' differs from u outside the ball of radius " + format_double(radius));
  }
}

Candidate with_values(const Field& u, std::string name) {
  Candidate c{std::move(name), u};
  c.field.profile = nullptr;
  c.field.clamp_count = 0;
  return c;
}

}  // namespace

std::vector<Candidate> build_candidate_suite(const Field& u, double omega_radius, const EnergyParams& params,
                                             const PotentialSpec& spec, const SuiteOptions& opts) {
  const auto cells = cells_in_ball(u.grid, omega_radius);
  std::vector<Candidate> out;
  out.push_back(with_values(u, "self"));
  for (double c : {-1.0, 0.0, 1.0}) {
    Candidate v = with_values(u, "const:" + format_double(c));
    for (std::size_t idx : cells) v.field.values[idx] = c;
    out.push_back(std::move(v));
  }
  for (int axis = 0; axis < u.grid.n; ++axis) {
    for (int k = 1; k <= opts.translate_cells; ++k) {
      for (int sign : {1, -1}) {
        const int shift = sign * k;
        Candidate v = with_values(u, std::string("shift:") + (axis == 0 ? "x" : "y") + (sign > 0 ? "+" : "") +
                                         std::to_string(shift));
        for (std::size_t idx : cells) {
          const auto c = u.grid.coords(idx);
          const double val = axis == 0 ? u.at(c[0] - shift, c[1]) : u.at(c[0], c[1] - shift);
          v.field.values[idx] = std::clamp(val, -1.0, 1.0);
        }
        out.push_back(std::move(v));
      }
    }
  }
  if (opts.refine_iters > 0) {
    MinimizeConfig cfg;
    cfg.max_iters = opts.refine_iters;
    cfg.seed = opts.seed;
    Candidate v = with_values(minimize(u, omega_radius, params, spec, cfg).field, "refined");
    out.push_back(std::move(v));
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> noise(-opts.noise, opts.noise);
  for (int j = 0; j < opts.perturbations; ++j) {
    Candidate v = with_values(u, "perturb:" + std::to_string(j));
    for (std::size_t idx : cells) v.field.values[idx] = std::clamp(u.values[idx] + noise(rng), -1.0, 1.0);
    out.push_back(std::move(v));
  }
  return out;
}

MinimalityCertificate certify_epsilon(const Field& u, double omega_radius, const EnergyParams& params,
                                      const PotentialSpec& spec, double epsilon,
                                      const std::vector<Candidate>& candidates) {
  if (!(epsilon >= 0.0)) throw DomainError("ε must be >= 0");
  for (const auto& c : candidates) check_compatible(u, c, omega_radius);
  const DiscreteEnergy energy(u, omega_radius, params, spec);
  MinimalityCertificate cert;
  cert.kind = MinimalityCertificate::Kind::Epsilon;
  cert.parameter = epsilon;
  cert.E0 = energy.value(u.values);
  cert.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double ev = energy.value(c.field.values);
    const double viol = cert.E0 - epsilon - ev;
    cert.entries.push_back({omega_radius, c.name, cert.E0, ev, viol});
    if (viol > cert.worst_violation) {
      cert.worst_violation = viol;
      cert.worst_candidate = c.name;
      cert.worst_radius = omega_radius;
    }
    ++cert.candidates_tested;
  }
  cert.passed = cert.worst_violation <= 0.0;
  return cert;
}

MinimalityCertificate certify_Q(const Field& u, double omega_radius, const EnergyParams& params,
                                const PotentialSpec& spec, double Q, const std::vector<SubdomainSuite>& suites) {
  if (!(Q >= 1.0)) throw DomainError("Q must be >= 1");
  MinimalityCertificate cert;
  cert.kind = MinimalityCertificate::Kind::Q;
  cert.parameter = Q;
  cert.E0 = DiscreteEnergy(u, omega_radius, params, spec).value(u.values);
  cert.implied_epsilon = (Q - 1.0) * cert.E0;
  cert.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& suite : suites) {
    if (!(suite.radius > 0.0) || suite.radius > omega_radius * (1.0 + 1e-12))
      throw DomainError("subdomain radius " + format_double(suite.radius) + " must lie in (0, Ω radius]");
    for (const auto& c : suite.candidates) check_compatible(u, c, suite.radius);
    const DiscreteEnergy energy(u, suite.radius, params, spec);
    const double eu = energy.value(u.values);
    for (const auto& c : suite.candidates) {
      const double ev = energy.value(c.field.values);
      const double viol = eu - Q * ev;
      cert.entries.push_back({suite.radius, c.name, eu, ev, viol});
      if (viol > cert.worst_violation) {
        cert.worst_violation = viol;
        cert.worst_candidate = c.name;
        cert.worst_radius = suite.radius;
      }
      ++cert.candidates_tested;
    }
  }
  cert.passed = cert.worst_violation <= 0.0;
  return cert;
}

// --- Worked examples ------------------------------------------------------------

Field bump_field(double eps, double h, int n, double box_radius) {
  if (!(eps > 0.0)) throw DomainError("bump scale must be positive");
  const double inner = std::exp(-2.0);
  auto profile = [eps, inner](const Point& x) {
    const double r = norm(x) / eps;
    if (r <= inner) return 1.0;
    if (r < 1.0) return std::abs(std::log(r)) - 1.0;
    return -1.0;
  };
  return make_field(Grid::centered(n, h, box_radius), profile, Exterior::constant(-1.0));
}

Field indicator_field(double eta, double h, int n, double box_radius) {
  if (!(eta > 0.0)) throw DomainError("indicator radius must be positive");
  const double r2 = eta * eta * (1.0 + 1e-12);
  auto profile = [r2](const Point& x) { return x[0] * x[0] + x[1] * x[1] <= r2 ? 1.0 : -1.0; };
  return make_field(Grid::centered(n, h, box_radius), profile, Exterior::constant(-1.0));
}

BumpStudy bump_study(double eps, double h, const EnergyParams& params, const PotentialSpec& spec, double Q,
                     const SuiteOptions& suite) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("bump scale must lie in (0, 1)");
  const int n = params.n;
  const double sigma = params.sigma();
  BumpStudy out;
  out.eps = eps;

  const Field u1 = bump_field(1.0, h / eps, n, 1.0);
  out.C = kinetic_energy(u1, 1.0, params).kinetic();
  const Field u_wide = bump_field(1.0, h / eps, n, 1.0 / eps);
  out.scaled_kinetic = std::pow(eps, n - sigma) * kinetic_energy(u_wide, 1.0 / eps, params).kinetic();

  const double ball = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  out.potential_bound = std::pow(eps, n) * spec.Lambda * std::pow(2.0, spec.m) * ball;
  out.eps_tilde = std::pow(eps, n - sigma) * (out.C * (1.0 - params.s) + std::pow(eps, sigma) * spec.Lambda *
                                                                            std::pow(2.0, spec.m) * ball);

  const Field u = bump_field(eps, h, n, 1.0);
  const EnergyBreakdown e = total_energy(u, 1.0, params, spec);
  out.energy = e.total;
  out.kinetic = e.kinetic();
  out.potential = e.potential;

  out.epsilon_cert = certify_epsilon(u, 1.0, params, spec, out.eps_tilde,
                                     build_candidate_suite(u, 1.0, params, spec, suite));
  out.epsilon_cert_sub = certify_epsilon(u, 0.5, params, spec, out.eps_tilde,
                                         build_candidate_suite(u, 0.5, params, spec, suite));

  std::vector<SubdomainSuite> suites;
  suites.push_back({eps, build_candidate_suite(u, eps, params, spec, suite)});
  suites.push_back({1.0, build_candidate_suite(u, 1.0, params, spec, suite)});
  out.q_cert = certify_Q(u, 1.0, params, spec, Q, suites);
  for (const auto& entry : out.q_cert.entries) {
    if (entry.radius != eps) continue;
    out.energy_on_B_eps = entry.energy_u;
    if (entry.candidate == "const:1") out.energy_plus_one = entry.energy_v;
    if (entry.candidate == "const:-1") out.energy_minus_one = entry.energy_v;
  }
  return out;
}

}  // namespace nlphase
