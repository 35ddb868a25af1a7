#include "nlphase/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "nlphase/analysis.hpp"
#include "nlphase/barriers.hpp"
#include "nlphase/energy.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/fields.hpp"
#include "nlphase/format.hpp"
#include "nlphase/minimizer.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

namespace {

using Summary = std::vector<std::pair<std::string, std::string>>;

KeySpec real(std::string key, std::string def, std::string help) {
  return {std::move(key), ValueType::Real, false, std::move(def), std::move(help)};
}
KeySpec integer(std::string key, std::string def, std::string help) {
  return {std::move(key), ValueType::Integer, false, std::move(def), std::move(help)};
}
KeySpec list(std::string key, std::string def, std::string help) {
  return {std::move(key), ValueType::RealList, false, std::move(def), std::move(help)};
}
KeySpec text(std::string key, std::string def, std::string help) {
  return {std::move(key), ValueType::Text, false, std::move(def), std::move(help)};
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.insert(keys.begin(), {
      {"experiment.type", ValueType::Text, true, "", "experiment name"},
      integer("run.seed", "1", "seed for every random choice"),
      text("output.prefix", "auto", "output file stem (default: lower-case experiment name)"),
  });
  return keys;
}

std::vector<KeySpec> potential_keys() {
  return {real("potential.m", "2", "well exponent m"),
          text("potential.normalization", "scaled", "scaled: (1-x^2)^m/(2m), plain: (1-x^2)^m"),
          real("potential.c", "0.5", "calibration level for (c1, q)")};
}

std::vector<KeySpec> field_keys(const std::string& exterior, const std::string& initial, const std::string& box) {
  return {integer("grid.n", "1", "dimension (1 or 2)"),
          real("grid.h", "1/4", "grid spacing"),
          real("grid.box_radius", box, "half-width of the computational box"),
          real("domain.omega_radius", "auto", "radius of Ω (default: box radius)"),
          text("field.exterior", exterior, "exterior data: const:<v>, sign, psi:<R>"),
          text("field.initial", initial, "initial guess on Ω: random, tanh, const:<v>"),
          integer("minimize.max_iters", "5000", "iteration cap"),
          real("minimize.grad_tol", "1e-6", "projected-gradient stationarity threshold"),
          real("minimize.step_init", "1", "first trial step")};
}

template <class... Vs>
std::vector<KeySpec> concat(Vs... parts) {
  std::vector<KeySpec> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

std::vector<ExperimentInfo> build_catalog() {
  std::vector<ExperimentInfo> c;
  c.push_back({"PotentialCheck",
               "derivative identity for the recursive polynomials P_m^k and the well-growth condition on W_m",
               with_common({list("potential.m_list", "2,2.5,3", "exponents m to check"),
                            real("potential.c", "0.5", "calibration level for (c1, q)"),
                            integer("check.samples", "200", "(r, t) samples per axis for the well condition"),
                            integer("check.points", "101", "sample points for the derivative identity")})});
  c.push_back({"KernelBounds",
               "three-regime lower bound on the interaction L(B_R, R^n \\ B_{R+r})",
               with_common({list("kernel.dims", "1,2", "dimensions n"),
                            real("energy.p", "2", "exponent p"),
                            list("kernel.s_list", "0.25,0.5,0.75", "values of s"),
                            list("kernel.R_list", "1,2,4", "radii R"),
                            list("kernel.r_fractions", "0.1,0.5,0.9", "r as fractions of δR")})});
  c.push_back({"BarrierSweep",
               "energy upper bound for minimizers on B_R via the radial barrier ψ, three regimes in sp",
               with_common(concat(std::vector<KeySpec>{integer("grid.n", "1", "dimension (1 or 2)"),
                                                       real("grid.h", "1/10", "grid spacing (<= 1/4)"),
                                                       real("energy.s", "0.25", "fractional order s"),
                                                       real("energy.p", "2", "exponent p"),
                                                       list("barrier.R_list", "4,8,16,32", "radii R >= 2"),
                                                       integer("barrier.lipschitz_samples", "10000",
                                                               "random pairs for the ψ Lipschitz bound")},
                                  potential_keys()))});
  c.push_back({"Minimize",
               "existence of minimizers with prescribed exterior data, and the barrier energy chain for them",
               with_common(concat(field_keys("const:-1", "random", "4"),
                                  std::vector<KeySpec>{real("energy.s", "0.5", "fractional order s"),
                                                       real("energy.p", "2", "exponent p"),
                                                       real("check.barrier_R", "0",
                                                            "R for the energy chain on B_R (0: skip)")},
                                  potential_keys()))});
  c.push_back({"DensityScan",
               "density estimates for ε-minimizers: c ∫_band |1+u|^m + |B_r ∩ {u > θ2}| > c̃ r^n",
               with_common(concat(field_keys("sign", "tanh", "64"),
                                  std::vector<KeySpec>{real("energy.s", "0.75", "fractional order s"),
                                                       real("energy.p", "2", "exponent p"),
                                                       list("scan.radii", "2,4,8,16", "radii, B_{3r} ⊂ Ω"),
                                                       real("scan.theta1", "0", "seed threshold θ1"),
                                                       real("scan.theta2", "0", "volume threshold θ2"),
                                                       real("scan.c0", "0", "seed lower bound c0")},
                                  potential_keys()))});
  c.push_back({"FullDensityScan",
               "full density estimate |B_r ∩ {u > θ2}| > c̃ r^n under the strengthened lower bound on W",
               with_common(concat(field_keys("sign", "tanh", "64"),
                                  std::vector<KeySpec>{real("energy.s", "0.75", "fractional order s"),
                                                       real("energy.p", "2", "exponent p"),
                                                       list("scan.radii", "2,4,8,16", "radii, B_{4r} ⊂ Ω"),
                                                       real("scan.theta1", "0", "seed threshold θ1"),
                                                       real("scan.theta2", "0", "volume threshold θ2"),
                                                       real("scan.c0", "0", "seed lower bound c0")},
                                  potential_keys()))});
  c.push_back({"GammaSweep",
               "Γ-limit of (1-s) ∫_Ω∫_{R^n} as s -> 1: (K_{n,p}/p) ∫_Ω |∇v|^p",
               with_common(concat(std::vector<KeySpec>{integer("grid.n", "1", "dimension (1 or 2)"),
                                                       real("grid.h", "1/1024", "grid spacing"),
                                                       real("grid.box_radius", "3", "half-width of the box"),
                                                       real("domain.omega_radius", "auto", "radius of Ω"),
                                                       text("field.profile", "cos2", "cos2 or zero"),
                                                       real("energy.p", "2", "exponent p"),
                                                       list("energy.s_list", "0.8,0.9,0.95", "increasing s values")},
                                  potential_keys()))});
  c.push_back({"EpsilonExamples",
               "ε-minimizers that are not Q-minimizers (scaled log bump) and the η^(1-sp) energy of small droplets",
               with_common(concat(std::vector<KeySpec>{integer("grid.n", "1", "dimension (1 or 2)"),
                                                       real("energy.s", "0.1", "fractional order s"),
                                                       real("energy.p", "2", "exponent p"),
                                                       real("bump.epsilon", "1/128", "bump scale ε"),
                                                       real("bump.h", "1/4096", "grid spacing for the bump"),
                                                       real("cert.Q", "2", "Q for the quasi-minimality test"),
                                                       list("eta.list", "1/16,1/8,1/4,1/2", "droplet radii η"),
                                                       real("eta.h", "1/512", "grid spacing for the droplets"),
                                                       real("eta.box_radius", "1", "Ω = B_R for the droplets")},
                                  potential_keys()))});
  return c;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

// --- Validation helpers ------------------------------------------------------------

void require(bool ok, const Config& c, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(c.where(key) + key + ": " + msg);
}

void check_unit_interval(const Config& c, const std::string& key) {
  const double v = c.get_double(key);
  require(v > 0.0 && v < 1.0, c, key, "must lie in (0, 1), got " + format_double(v));
}

Normalization normalization_of(const Config& c) {
  const std::string v = c.get_string("potential.normalization");
  if (v == "scaled") return Normalization::Scaled;
  if (v == "plain") return Normalization::Plain;
  throw ConfigError(c.where("potential.normalization") + "potential.normalization: expected scaled or plain, got '" +
                    v + "'");
}

double omega_of(const Config& c) {
  const std::string v = c.get_string("domain.omega_radius");
  return v == "auto" ? c.get_double("grid.box_radius") : c.get_double("domain.omega_radius");
}

void check_grid(const Config& c) {
  const long long n = c.get_integer("grid.n");
  require(n == 1 || n == 2, c, "grid.n", "must be 1 or 2");
  require(c.get_double("grid.h") > 0.0, c, "grid.h", "must be positive");
  if (c.has("grid.box_radius")) {
    const double b = c.get_double("grid.box_radius");
    require(b >= c.get_double("grid.h"), c, "grid.box_radius", "must be at least one cell");
    const double w = omega_of(c);
    require(w > 0.0 && w <= b * (1.0 + 1e-12), c, "domain.omega_radius",
            "Ω radius " + format_double(w) + " must lie in (0, box radius " + format_double(b) + "]");
  }
}

void check_energy(const Config& c, double s) {
  const double p = c.get_double("energy.p");
  require(p > 1.0, c, "energy.p", "must be > 1");
  const int n = c.has("grid.n") ? static_cast<int>(c.get_integer("grid.n")) : 1;
  try {
    make_energy_params(s, p, n).validate();
  } catch (const DomainError& e) {
    throw ConfigError(c.where("energy.s") + e.what());
  }
}

void check_potential(const Config& c) {
  if (c.has("potential.m")) require(c.get_double("potential.m") >= 1.0, c, "potential.m", "must be >= 1");
  if (c.has("potential.normalization")) normalization_of(c);
  if (c.has("potential.c")) require(c.get_double("potential.c") > 0.0, c, "potential.c", "must be positive");
}

void check_exterior_and_initial(const Config& c) {
  try {
    Exterior::parse(c.get_string("field.exterior"));
  } catch (const std::exception& e) {
    throw ConfigError(c.where("field.exterior") + "field.exterior: " + e.what());
  }
  const std::string init = c.get_string("field.initial");
  if (init == "random" || init == "tanh") return;
  if (init.rfind("const:", 0) == 0) {
    try {
      const double v = parse_real(init.substr(6));
      require(v >= -1.0 && v <= 1.0, c, "field.initial", "constant must lie in [-1, 1]");
      return;
    } catch (const InputError&) {
    }
  }
  throw ConfigError(c.where("field.initial") + "field.initial: expected random, tanh or const:<v>, got '" + init + "'");
}

void check_minimize(const Config& c) {
  require(c.get_integer("minimize.max_iters") >= 1, c, "minimize.max_iters", "must be >= 1");
  require(c.get_double("minimize.grad_tol") > 0.0, c, "minimize.grad_tol", "must be positive");
  require(c.get_double("minimize.step_init") > 0.0, c, "minimize.step_init", "must be positive");
}

void check_increasing(const Config& c, const std::string& key, double lo, double hi, bool open_hi) {
  const auto xs = c.get_list(key);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool in = xs[i] > lo && (open_hi ? xs[i] < hi : xs[i] <= hi);
    require(in, c, key, "value " + format_double(xs[i]) + " out of range");
    if (i > 0) require(xs[i] > xs[i - 1], c, key, "values must be strictly increasing");
  }
}

void check_density(const Config& c, double factor) {
  check_grid(c);
  check_exterior_and_initial(c);
  check_minimize(c);
  check_unit_interval(c, "energy.s");
  check_energy(c, c.get_double("energy.s"));
  check_potential(c);
  check_increasing(c, "scan.radii", 0.0, INFINITY, true);
  for (const char* key : {"scan.theta1", "scan.theta2"}) {
    const double t = c.get_double(key);
    require(t > -1.0 && t < 1.0, c, key, "must lie in (-1, 1)");
  }
  const double w = omega_of(c);
  const std::string ball = factor == 3.0 ? "B_{3r} ⊂ Ω" : "B_{4r} ⊂ Ω";
  for (double r : c.get_list("scan.radii"))
    require(factor * r <= w * (1.0 + 1e-12), c, "scan.radii",
            "radius " + format_double(r) + " violates " + ball + " (Ω radius " + format_double(w) + ")");
}

void check_experiment(const std::string& name, const Config& c) {
  if (name == "PotentialCheck") {
    for (double m : c.get_list("potential.m_list")) require(m >= 1.0, c, "potential.m_list", "exponents must be >= 1");
    require(c.get_double("potential.c") > 0.0, c, "potential.c", "must be positive");
    require(c.get_integer("check.samples") >= 2, c, "check.samples", "must be >= 2");
    require(c.get_integer("check.points") >= 2, c, "check.points", "must be >= 2");
  } else if (name == "KernelBounds") {
    for (double n : c.get_list("kernel.dims")) require(n == 1.0 || n == 2.0, c, "kernel.dims", "dimensions must be 1 or 2");
    require(c.get_double("energy.p") > 1.0, c, "energy.p", "must be > 1");
    check_increasing(c, "kernel.s_list", 0.0, 1.0, true);
    check_increasing(c, "kernel.R_list", 0.0, INFINITY, true);
    check_increasing(c, "kernel.r_fractions", 0.0, 1.0, true);
  } else if (name == "BarrierSweep") {
    check_grid(c);
    check_unit_interval(c, "energy.s");
    check_energy(c, c.get_double("energy.s"));
    check_potential(c);
    require(c.get_double("grid.h") <= 0.25, c, "grid.h", "does not resolve the unit ramp of ψ (needs h <= 1/4)");
    check_increasing(c, "barrier.R_list", 0.0, INFINITY, true);
    for (double R : c.get_list("barrier.R_list")) require(R >= 2.0, c, "barrier.R_list", "radii must be >= 2");
    require(c.get_integer("barrier.lipschitz_samples") >= 100, c, "barrier.lipschitz_samples", "must be >= 100");
  } else if (name == "Minimize") {
    check_grid(c);
    check_exterior_and_initial(c);
    check_minimize(c);
    check_unit_interval(c, "energy.s");
    check_energy(c, c.get_double("energy.s"));
    check_potential(c);
    const double R = c.get_double("check.barrier_R");
    if (R != 0.0) {
      require(R >= 2.0, c, "check.barrier_R", "must be 0 or >= 2");
      require(R + 2.0 <= omega_of(c) * (1.0 + 1e-12), c, "check.barrier_R", "needs B_{R+2} ⊂ Ω");
    }
  } else if (name == "DensityScan") {
    check_density(c, 3.0);
  } else if (name == "FullDensityScan") {
    check_density(c, 4.0);
  } else if (name == "GammaSweep") {
    check_grid(c);
    check_potential(c);
    check_increasing(c, "energy.s_list", 0.0, 1.0, true);
    for (double s : c.get_list("energy.s_list")) check_energy(c, s);
    const std::string prof = c.get_string("field.profile");
    require(prof == "cos2" || prof == "zero", c, "field.profile", "expected cos2 or zero");
    require(omega_of(c) > 1.0, c, "domain.omega_radius", "the bump is supported in B_1; Ω must be larger");
  } else if (name == "EpsilonExamples") {
    const long long n = c.get_integer("grid.n");
    require(n == 1 || n == 2, c, "grid.n", "must be 1 or 2");
    check_unit_interval(c, "energy.s");
    check_energy(c, c.get_double("energy.s"));
    check_potential(c);
    check_unit_interval(c, "bump.epsilon");
    require(c.get_double("bump.h") > 0.0, c, "bump.h", "must be positive");
    require(c.get_double("cert.Q") >= 1.0, c, "cert.Q", "must be >= 1");
    check_increasing(c, "eta.list", 0.0, 1.0, true);
    require(c.get_double("eta.h") > 0.0, c, "eta.h", "must be positive");
    const double R = c.get_double("eta.box_radius");
    for (double eta : c.get_list("eta.list"))
      require(eta < R, c, "eta.list", "droplet radius must be below eta.box_radius");
    require(c.get_list("eta.list").size() >= 3, c, "eta.list", "needs at least 3 radii for the exponent fit");
  }
}

// --- Run helpers ------------------------------------------------------------------

struct Outcome {
  std::string csv_header;
  std::vector<std::vector<std::string>> rows;
  Summary summary;
  bool diverged = false;
  bool check_failed = false;
  std::vector<std::pair<std::string, std::string>> extra_files;  // suffix, content
};

std::string fmt(double x) { return format_double(x); }
std::string flag(bool b) { return b ? "1" : "0"; }

PotentialSpec potential_of(const Config& c) {
  return prototype_potential(c.get_double("potential.m"), normalization_of(c), c.get_double("potential.c"));
}

EnergyParams params_of(const Config& c, double s, int threads) {
  const int n = c.has("grid.n") ? static_cast<int>(c.get_integer("grid.n")) : 1;
  EnergyParams p = make_energy_params(s, c.get_double("energy.p"), n);
  p.threads = threads;
  return p;
}

Field initial_field(const Config& c, std::uint64_t seed) {
  const int n = static_cast<int>(c.get_integer("grid.n"));
  const Grid g = Grid::centered(n, c.get_double("grid.h"), c.get_double("grid.box_radius"));
  const Exterior ext = Exterior::parse(c.get_string("field.exterior"));
  const double w = omega_of(c);
  const double w2 = w * w * (1.0 + 1e-12);
  const std::string init = c.get_string("field.initial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field f;
  f.grid = g;
  f.exterior = ext;
  f.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.center(i);
    if (static_cast<double>(g.radius2_units(i)) * g.h * g.h > w2) {
      f.values[i] = std::clamp(ext(x), -1.0, 1.0);
      continue;
    }
    if (init == "random")
      f.values[i] = uni(rng);
    else if (init == "tanh")
      f.values[i] = std::tanh(x[0]);
    else
      f.values[i] = parse_real(init.substr(6));
  }
  return f;
}

MinimizeConfig minimize_config_of(const Config& c, std::uint64_t seed) {
  MinimizeConfig m;
  m.max_iters = static_cast<int>(c.get_integer("minimize.max_iters"));
  m.grad_tol = c.get_double("minimize.grad_tol");
  m.step_init = c.get_double("minimize.step_init");
  m.seed = seed;
  return m;
}

Outcome run_potential_check(const Config& c, std::uint64_t, int) {
  Outcome o;
  o.csv_header = "m,check,k,value,threshold,pass";
  const int points = static_cast<int>(c.get_integer("check.points"));
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = -1.0 + 2.0 * i / (points - 1);
  for (double m : c.get_list("potential.m_list")) {
    for (int k = 1; k <= static_cast<int>(std::floor(m)); ++k) {
      const IdentityCheck id = check_derivative_identity(m, k, xs);
      const bool ok = id.max_residual <= 1e-6;
      o.check_failed |= !ok;
      o.rows.push_back({fmt(m), "identity", std::to_string(k), fmt(id.max_residual), "1e-06", flag(ok)});
    }
    const PotentialSpec spec = prototype_potential(m, Normalization::Plain, c.get_double("potential.c"));
    const WellCheck wc = check_well_condition(spec, static_cast<int>(c.get_integer("check.samples")));
    o.check_failed |= !wc.holds;
    o.rows.push_back({fmt(m), "well_condition", std::to_string(spec.k), fmt(wc.worst_slack), "0", flag(wc.holds)});
    o.rows.push_back({fmt(m), "q", std::to_string(spec.k), fmt(spec.q), "", "1"});
    o.rows.push_back({fmt(m), "c1", std::to_string(spec.k), fmt(spec.c1), "", "1"});
  }
  return o;
}

Outcome run_kernel_bounds(const Config& c, std::uint64_t, int threads) {
  Outcome o;
  o.csv_header = "n,regime,s,p,R,r,L,bound,margin";
  const double p = c.get_double("energy.p");
  double worst = INFINITY;
  for (double nd : c.get_list("kernel.dims")) {
    const int n = static_cast<int>(nd);
    const double delta = interaction_delta(n, p);
    for (double s : c.get_list("kernel.s_list")) {
      EnergyParams params = make_energy_params(s, p, n);
      params.threads = threads;
      for (double R : c.get_list("kernel.R_list")) {
        for (double frac : c.get_list("kernel.r_fractions")) {
          const double r = frac * delta * R;
          const double L = interaction_L(R, r, params);
          const double bound = interaction_lower_bound(R, r, s, p, n);
          const double margin = L - bound;
          worst = std::min(worst, margin);
          o.check_failed |= !(margin > 0.0);
          o.rows.push_back({std::to_string(n), regime_name(regime_of(s, p)), fmt(s), fmt(p), fmt(R), fmt(r), fmt(L),
                            fmt(bound), fmt(margin)});
        }
      }
    }
  }
  o.summary.push_back({"worst_margin", fmt(worst)});
  return o;
}

Outcome run_barrier_sweep(const Config& c, std::uint64_t seed, int threads) {
  Outcome o;
  o.csv_header = "R,s,p,n,energy_kinetic,energy_potential,F_R,ratio,diverged";
  const EnergyParams params = params_of(c, c.get_double("energy.s"), threads);
  const PotentialSpec spec = potential_of(c);
  const auto Rs = c.get_list("barrier.R_list");
  const BarrierSweep sw = barrier_energy_sweep(Rs, params, spec, c.get_double("grid.h"));
  for (const auto& r : sw.rows) {
    o.diverged |= r.diverged;
    o.rows.push_back({fmt(r.R), fmt(sw.s), fmt(sw.p), std::to_string(sw.n), fmt(r.energy_kinetic),
                      fmt(r.energy_potential), fmt(r.F_R), fmt(r.ratio), flag(r.diverged)});
  }
  const LipschitzReport lip = lipschitz_bound_check(Rs.front(), static_cast<int>(c.get_integer("barrier.lipschitz_samples")),
                                                    params, seed);
  o.check_failed |= lip.worst_deficit > 0.0;
  o.summary = {{"regime", regime_name(sw.regime)},
               {"fitted_exponent", fmt(sw.slope)},
               {"fit_r_squared", fmt(sw.r_squared)},
               {"ratio_spread", fmt(sw.ratio_spread)},
               {"max_ratio", fmt(sw.c_bar_envelope)},
               {"lipschitz_pairs", std::to_string(lip.pairs)},
               {"lipschitz_worst_deficit", fmt(lip.worst_deficit)}};
  return o;
}

Outcome run_minimize(const Config& c, std::uint64_t seed, int threads) {
  Outcome o;
  o.csv_header = "iter,energy,grad_norm,step";
  const EnergyParams params = params_of(c, c.get_double("energy.s"), threads);
  const PotentialSpec spec = potential_of(c);
  const Field u0 = initial_field(c, seed);
  const double w = omega_of(c);
  const MinimizeResult res = minimize(u0, w, params, spec, minimize_config_of(c, seed));
  for (const auto& t : res.trace) o.rows.push_back({std::to_string(t.iter), fmt(t.energy), fmt(t.grad_norm), fmt(t.step)});
  std::ostringstream field;
  write_field(field, res.field);
  o.extra_files.push_back({"_field.txt", field.str()});
  o.summary = {{"status", status_name(res.status)},
               {"iterations", std::to_string(res.iterations)},
               {"energy", fmt(res.energy)},
               {"grad_norm", fmt(res.grad_norm)}};
  const double R = c.get_double("check.barrier_R");
  if (R != 0.0) {
    const BoundCheck bc =
        minimizer_energy_bound_check(res.field, R, params, spec, res.status == MinimizeStatus::Converged);
    o.check_failed |= bc.status == CheckStatus::Fail;
    o.summary.push_back({"barrier_check", status_name(bc.status)});
    o.summary.push_back({"barrier_lhs", fmt(bc.lhs)});
    o.summary.push_back({"barrier_rhs", fmt(bc.rhs)});
    o.summary.push_back({"barrier_margin", fmt(bc.margin)});
  }
  return o;
}

Outcome run_density(const Config& c, std::uint64_t seed, int threads, bool full) {
  Outcome o;
  o.csv_header = full ? "r,V,interface,lhs,lhs_over_rn,energy,reabsorption_margin" : "r,V,interface,lhs,lhs_over_rn";
  const EnergyParams params = params_of(c, c.get_double("energy.s"), threads);
  const PotentialSpec spec = potential_of(c);
  const double w = omega_of(c);
  const MinimizeResult res = minimize(initial_field(c, seed), w, params, spec, minimize_config_of(c, seed));
  DensityOptions opts;
  opts.theta1 = c.get_double("scan.theta1");
  opts.theta2 = c.get_double("scan.theta2");
  opts.c0 = c.get_double("scan.c0");
  opts.omega_radius = w;
  const auto radii = c.get_list("scan.radii");
  const DensityScan d = full ? full_density_scan(res.field, spec, params, radii, opts)
                             : density_scan(res.field, spec, radii, opts);
  for (const auto& r : d.rows) {
    std::vector<std::string> row{fmt(r.r), fmt(r.volume), fmt(r.interface), fmt(r.lhs), fmt(r.lhs_over_rn)};
    if (full) {
      row.push_back(fmt(r.energy));
      row.push_back(fmt(r.reabsorption_margin));
      o.check_failed |= r.reabsorption_margin < 0.0;
    }
    o.rows.push_back(std::move(row));
  }
  o.check_failed |= !(d.c_tilde_hat > 0.0);
  o.summary = {{"minimize_status", status_name(res.status)},
               {"minimize_iterations", std::to_string(res.iterations)},
               {"minimize_energy", fmt(res.energy)},
               {"theta_star", fmt(d.theta_star)},
               {"theta_sup", fmt(d.theta_sup)},
               {"band_weight", fmt(d.band_weight)},
               {"seed_volume", fmt(d.seed_volume)},
               {"fitted_exponent", fmt(d.fit.slope)},
               {"fit_r_squared", fmt(d.fit.r_squared)},
               {"c_tilde_hat", fmt(d.c_tilde_hat)}};
  if (full) o.summary.push_back({"lambda_theta_sup", fmt(d.lambda_sup)});
  return o;
}

Outcome run_gamma_sweep(const Config& c, std::uint64_t, int threads) {
  Outcome o;
  o.csv_header = "s,measured,limit,rel_err,resolution_flag,energy_s,energy_1";
  const PotentialSpec spec = potential_of(c);
  const int n = static_cast<int>(c.get_integer("grid.n"));
  const Grid g = Grid::centered(n, c.get_double("grid.h"), c.get_double("grid.box_radius"));
  const bool zero = c.get_string("field.profile") == "zero";
  auto profile = [zero](const Point& x) {
    const double r = norm(x);
    if (zero || r >= 1.0) return 0.0;
    const double cs = std::cos(std::numbers::pi * r / 2.0);
    return cs * cs;
  };
  const Field v = make_field(g, profile, Exterior::constant(0.0));
  const GammaSweep sw = gamma_sweep(v, omega_of(c), c.get_double("energy.p"), c.get_list("energy.s_list"), spec, threads);
  for (const auto& r : sw.rows) {
    o.diverged |= r.diverged;
    o.rows.push_back({fmt(r.s), fmt(r.measured), fmt(r.limit), fmt(r.rel_err), flag(r.resolution_flag),
                      fmt(r.energy_s), fmt(r.energy_1)});
  }
  o.summary = {{"tail_monotone", flag(sw.tail_monotone)}};
  return o;
}

Outcome run_epsilon_examples(const Config& c, std::uint64_t seed, int threads) {
  Outcome o;
  o.csv_header = "example,parameter,quantity,value";
  const EnergyParams params = params_of(c, c.get_double("energy.s"), threads);
  const PotentialSpec spec = potential_of(c);
  const int n = params.n;
  SuiteOptions suite;
  suite.seed = seed;
  const double eps = c.get_double("bump.epsilon");
  const BumpStudy b = bump_study(eps, c.get_double("bump.h"), params, spec, c.get_double("cert.Q"), suite);
  const std::string pe = fmt(eps);
  auto add = [&](const std::string& ex, const std::string& par, const std::string& q, double v) {
    o.rows.push_back({ex, par, q, fmt(v)});
  };
  add("bump", pe, "C", b.C);
  add("bump", pe, "eps_tilde", b.eps_tilde);
  add("bump", pe, "energy_B1", b.energy);
  add("bump", pe, "kinetic_B1", b.kinetic);
  add("bump", pe, "scaled_kinetic", b.scaled_kinetic);
  add("bump", pe, "potential_B1", b.potential);
  add("bump", pe, "potential_bound", b.potential_bound);
  add("bump", pe, "eps_cert_worst_violation", b.epsilon_cert.worst_violation);
  add("bump", pe, "eps_cert_passed", b.epsilon_cert.passed);
  add("bump", pe, "eps_cert_sub_passed", b.epsilon_cert_sub.passed);
  add("bump", pe, "q_cert_worst_violation", b.q_cert.worst_violation);
  add("bump", pe, "q_cert_passed", b.q_cert.passed);
  add("bump", pe, "q_cert_implied_eps", b.q_cert.implied_epsilon);
  add("bump", pe, "energy_B_eps", b.energy_on_B_eps);
  add("bump", pe, "energy_v_plus_one_B_eps", b.energy_plus_one);
  add("bump", pe, "energy_v_minus_one_B_eps", b.energy_minus_one);
  // The certificate outcomes are the claims under test.
  o.check_failed |= !b.epsilon_cert.passed || !b.epsilon_cert_sub.passed || b.q_cert.passed;

  const double box = c.get_double("eta.box_radius");
  const double sigma = params.sigma();
  std::vector<double> etas, kins;
  for (double eta : c.get_list("eta.list")) {
    const Field u = indicator_field(eta, c.get_double("eta.h"), n, box);
    const EnergyBreakdown e = total_energy(u, box, params, spec);
    o.diverged |= e.diverged;
    add("droplet", fmt(eta), "kinetic", e.kinetic());
    add("droplet", fmt(eta), "potential", e.potential);
    if (n == 1 && sigma < 1.0)
      add("droplet", fmt(eta), "closed_form", std::pow(2.0, params.p + 1.0) * std::pow(2.0 * eta, 1.0 - sigma) /
                                                  (sigma * (1.0 - sigma)));
    if (!e.diverged) {
      etas.push_back(eta);
      kins.push_back(e.kinetic());
    }
  }
  if (etas.size() >= 3) {
    const FitResult fit = fit_exponent(etas, kins);
    o.summary.push_back({"droplet_exponent", fmt(fit.slope)});
    o.summary.push_back({"droplet_expected_exponent", fmt(n - sigma)});
  }
  o.summary.push_back({"eps_cert_worst_candidate", b.epsilon_cert.worst_candidate});
  o.summary.push_back({"q_cert_worst_candidate", b.q_cert.worst_candidate});
  o.summary.push_back({"q_cert_worst_radius", fmt(b.q_cert.worst_radius)});
  return o;
}

std::string csv_text(const std::string& name, const Config& resolved, const Outcome& o) {
  std::ostringstream out;
  out << "# nlphase " << name << "\n";
  for (const auto& [k, e] : resolved.entries()) out << "# " << k << " = " << e.value << "\n";
  out << o.csv_header << "\n";
  for (const auto& row : o.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = build_catalog();
  return catalog;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : experiment_catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

Config resolve_config(const Config& raw) {
  const std::string name = raw.get_string("experiment.type");
  const ExperimentInfo* info = nullptr;
  for (const auto& e : experiment_catalog())
    if (e.name == name) info = &e;
  if (!info) throw ConfigError(raw.where("experiment.type") + "unknown experiment '" + name + "'");

  for (const auto& [key, entry] : raw.entries()) {
    const bool known = std::any_of(info->keys.begin(), info->keys.end(), [&](const KeySpec& k) { return k.key == key; });
    if (!known) throw ConfigError(raw.where(key) + "unknown key '" + key + "' for experiment " + name);
  }
  Config c = raw;
  for (const auto& k : info->keys) {
    if (!c.has(k.key)) {
      if (k.required) throw ConfigError(raw.source() + ": missing required key '" + k.key + "'");
      c.set(k.key, k.default_value);
    }
    const std::string& v = c.get_string(k.key);
    if (v == "auto") continue;
    switch (k.type) {
      case ValueType::Real: c.get_double(k.key); break;
      case ValueType::Integer: c.get_integer(k.key); break;
      case ValueType::RealList: c.get_list(k.key); break;
      case ValueType::Text: break;
    }
  }
  if (c.get_string("output.prefix") == "auto") c.set("output.prefix", lower(name));
  const std::string prefix = c.get_string("output.prefix");
  require(prefix.find('/') == std::string::npos && prefix != "." && prefix != "..", c, "output.prefix",
          "must be a plain file stem");
  require(c.get_integer("run.seed") >= 0, c, "run.seed", "must be >= 0");
  check_experiment(name, c);
  return c;
}

RunResult run_experiment(const Config& raw, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  Config cfg = raw;
  if (opts.seed) cfg.set("run.seed", std::to_string(*opts.seed));
  const Config c = resolve_config(cfg);
  const std::string name = c.get_string("experiment.type");
  const auto seed = static_cast<std::uint64_t>(c.get_integer("run.seed"));
  const int threads = opts.threads;

  Outcome o;
  if (name == "PotentialCheck") o = run_potential_check(c, seed, threads);
  else if (name == "KernelBounds") o = run_kernel_bounds(c, seed, threads);
  else if (name == "BarrierSweep") o = run_barrier_sweep(c, seed, threads);
  else if (name == "Minimize") o = run_minimize(c, seed, threads);
  else if (name == "DensityScan") o = run_density(c, seed, threads, false);
  else if (name == "FullDensityScan") o = run_density(c, seed, threads, true);
  else if (name == "GammaSweep") o = run_gamma_sweep(c, seed, threads);
  else if (name == "EpsilonExamples") o = run_epsilon_examples(c, seed, threads);

  std::filesystem::create_directories(opts.output_dir);
  const std::string prefix = c.get_string("output.prefix");
  RunResult res;
  const auto csv = opts.output_dir / (prefix + ".csv");
  write_file(csv, csv_text(name, c, o));
  res.files.push_back(csv);
  for (const auto& [suffix, content] : o.extra_files) {
    const auto path = opts.output_dir / (prefix + suffix);
    write_file(path, content);
    res.files.push_back(path);
  }
  res.exit_code = o.diverged ? kExitDivergence : (o.check_failed ? kExitCertification : kExitOk);
  res.summary = o.summary;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream m;
  m << "tool = nlphase " << kVersion << "\n";
  m << "experiment = " << name << "\n";
  m << "config_source = " << c.source() << "\n";
  m << "threads = " << threads << "\n";
  m << "exit_code = " << res.exit_code << "\n";
  m << "wall_time_s = " << fmt(wall) << "\n";
  m << "[config]\n";
  for (const auto& [k, e] : c.entries()) m << k << " = " << e.value << "\n";
  m << "[outputs]\n";
  for (const auto& f : res.files) m << f.filename().string() << "\n";
  m << "[summary]\n";
  for (const auto& [k, v] : o.summary) m << k << " = " << v << "\n";
  const auto manifest = opts.output_dir / (prefix + ".manifest");
  write_file(manifest, m.str());
  res.files.push_back(manifest);
  return res;
}

}  // namespace nlphase
