#include "nlphase/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlphase/errors.hpp"
#include "nlphase/format.hpp"

namespace nlphase {

FitResult fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InputError("fit needs equally many x and y values");
  if (xs.size() < 3) throw InputError("fit needs at least 3 points");
  const std::size_t k = xs.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw InputError("fit needs positive values, got (" + format_double(xs[i]) + ", " + format_double(ys[i]) + ")");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InputError("fit needs at least two distinct x values");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

double unit_ball_volume(int n) {
  if (n < 1) throw DomainError("unit ball volume needs n >= 1");
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

namespace {

void check_radii(const std::vector<double>& radii, double omega, double factor, const Field& u) {
  if (radii.empty()) throw ConfigError("density scan needs at least one radius");
  if (omega > u.grid.box_radius() * (1.0 + 1e-12)) throw DomainError("Ω radius exceeds the box");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ConfigError("density radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ConfigError("density radii must be strictly increasing");
    if (factor * radii[i] > omega * (1.0 + 1e-12))
      throw DomainError("radius " + format_double(radii[i]) + " violates B_{" + format_double(factor) +
                        "r} ⊂ Ω with Ω radius " + format_double(omega));
  }
}

DensityScan scan_setup(const Field& u, const PotentialSpec& spec, const std::vector<double>& radii,
                       const DensityOptions& opts, double factor) {
  const double omega = opts.omega_radius > 0.0 ? opts.omega_radius : u.grid.box_radius();
  check_radii(radii, omega, factor, u);
  for (double t : {opts.theta1, opts.theta2})
    if (!(t > -1.0 && t < 1.0)) throw ConfigError("thresholds must lie in (-1, 1)");
  DensityScan d;
  d.theta1 = opts.theta1;
  d.theta2 = opts.theta2;
  d.theta_star = std::min({opts.theta1, opts.theta2, -1.0 + spec.q});
  d.theta_sup = std::max({opts.theta1, opts.theta2, -1.0 + spec.q});
  d.r0 = radii.front();
  d.c0 = opts.c0;
  d.seed_volume = level_set_volume(u, opts.theta1, d.r0);
  if (!(d.seed_volume > opts.c0))
    throw DomainError("seed condition fails: |B_" + format_double(d.r0) + " ∩ {u > " + format_double(opts.theta1) +
                      "}| = " + format_double(d.seed_volume) + " is not above c0 = " + format_double(opts.c0));
  return d;
}

void finish_scan(DensityScan& d, int n) {
  std::vector<double> rs, ls;
  d.c_tilde_hat = std::numeric_limits<double>::infinity();
  for (auto& row : d.rows) {
    row.lhs_over_rn = row.lhs / std::pow(row.r, n);
    d.c_tilde_hat = std::min(d.c_tilde_hat, row.lhs_over_rn);
    rs.push_back(row.r);
    ls.push_back(row.lhs);
  }
  if (rs.size() >= 3 && std::all_of(ls.begin(), ls.end(), [](double v) { return v > 0.0; }))
    d.fit = fit_exponent(rs, ls);
  else
    d.fit.slope = d.fit.intercept = d.fit.r_squared = std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

DensityScan density_scan(const Field& u, const PotentialSpec& spec, const std::vector<double>& radii,
                         const DensityOptions& opts) {
  DensityScan d = scan_setup(u, spec, radii, opts, 3.0);
  d.band_weight = std::pow(1.0 + d.theta_star, -spec.m);
  for (double r : radii) {
    DensityRow row;
    row.r = r;
    row.volume = level_set_volume(u, d.theta2, r);
    row.interface = interface_integral(u, d.theta_star, d.theta_sup, r, spec.m);
    row.lhs = d.band_weight * row.interface + row.volume;
    d.rows.push_back(row);
  }
  finish_scan(d, u.grid.n);
  return d;
}

DensityScan full_density_scan(const Field& u, const PotentialSpec& spec, const EnergyParams& params,
                              const std::vector<double>& radii, const DensityOptions& opts) {
  DensityScan d = scan_setup(u, spec, radii, opts, 4.0);
  d.volume_only = true;
  d.lambda_sup = lower_bound_constant(spec, d.theta_sup);
  if (!(d.lambda_sup > 0.0)) throw DomainError("potential has no positive lower bound constant at θ^*");
  for (double r : radii) {
    DensityRow row;
    row.r = r;
    row.volume = level_set_volume(u, d.theta2, r);
    row.interface = interface_integral(u, d.theta_star, d.theta_sup, r, spec.m);
    row.lhs = row.volume;
    row.energy = total_energy(u, r, params, spec).total;
    row.reabsorption_margin = row.energy / d.lambda_sup - row.interface;
    d.rows.push_back(row);
  }
  finish_scan(d, u.grid.n);
  return d;
}

GammaSweep gamma_sweep(const Field& v, double omega_radius, double p, const std::vector<double>& s_list,
                       const PotentialSpec& spec, int threads) {
  if (s_list.empty()) throw ConfigError("gamma sweep needs at least one s");
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!(s_list[i] > 0.0 && s_list[i] < 1.0)) throw ConfigError("s values must lie in (0, 1)");
    if (i > 0 && !(s_list[i] > s_list[i - 1])) throw ConfigError("s values must be strictly increasing");
  }
  const double h = v.grid.h;
  const int n = v.grid.n;
  GammaSweep out;
  out.p = p;
  const double limit = 2.0 * local_energy(v, omega_radius, p, zero_potential(spec.m));
  const double energy_1 = local_energy(v, omega_radius, p, spec);
  for (double s : s_list) {
    EnergyParams params = make_energy_params(s, p, n);
    params.threads = threads;
    const EnergyBreakdown e = total_energy(v, omega_radius, params, spec);
    GammaRow row;
    row.s = s;
    row.measured = (1.0 - s) * e.inner_form();
    row.limit = limit;
    row.rel_err = limit > 0.0 ? std::abs(row.measured - limit) / limit : std::abs(row.measured);
    row.energy_s = e.total;
    row.energy_1 = energy_1;
    row.resolution_flag = s > 1.0 - 4.0 * h;
    row.diverged = e.diverged;
    out.rows.push_back(row);
  }
  std::vector<double> errs;
  for (const auto& r : out.rows)
    if (!r.resolution_flag && !r.diverged) errs.push_back(r.rel_err);
  out.tail_monotone = errs.size() >= 3;
  for (std::size_t i = errs.size() >= 3 ? errs.size() - 2 : errs.size(); i < errs.size(); ++i)
    if (errs[i] > errs[i - 1]) out.tail_monotone = false;
  return out;
}

}  // namespace nlphase
