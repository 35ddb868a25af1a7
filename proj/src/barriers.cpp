#include "nlphase/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nlphase/analysis.hpp"
#include "nlphase/errors.hpp"

namespace nlphase {

double eval_psi(double R, double x_norm) {
  const double t = std::clamp(x_norm - R - 1.0, 0.0, 1.0);
  return -1.0 + 2.0 * t;
}

double eval_psi(double R, const Point& x) { return eval_psi(R, norm(x)); }

double eval_d(double R, double x_norm) { return std::max(R - x_norm, 1.0); }

double eval_d(double R, const Point& x) { return eval_d(R, norm(x)); }

Field make_psi_field(double R, double h, int n) {
  const Grid g = Grid::centered(n, h, R + 2.0);
  return make_field(g, [R](const Point& x) { return eval_psi(R, x); }, Exterior::psi(R));
}

LipschitzReport lipschitz_bound_check(double R, int samples, const EnergyParams& params, std::uint64_t seed) {
  if (samples < 100) throw ConfigError("lipschitz check needs at least 100 samples");
  if (!(R > 0.0)) throw DomainError("lipschitz check needs R > 0");
  std::mt19937_64 rng(seed);
  const double L = R + 3.0;
  std::uniform_real_distribution<double> coord(-L, L);
  // Half the pairs are local, so the ramp is actually probed at small |x - y|.
  std::uniform_real_distribution<double> local(-1.5, 1.5);
  LipschitzReport rep;
  rep.worst_deficit = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Point x{coord(rng), params.n == 2 ? coord(rng) : 0.0};
    Point y;
    if (i % 2 == 0) {
      y = {coord(rng), params.n == 2 ? coord(rng) : 0.0};
    } else {
      y = {x[0] + local(rng), params.n == 2 ? x[1] + local(rng) : 0.0};
    }
    const double dist = norm(Point{x[0] - y[0], x[1] - y[1]});
    const double dx = eval_d(R, x);
    const double lhs = std::abs(eval_psi(R, x) - eval_psi(R, y));
    const double rhs = dist < dx ? 2.0 * dist / dx : 2.0;
    const double deficit = lhs - rhs;
    if (deficit > rep.worst_deficit) {
      rep.worst_deficit = deficit;
      rep.worst_x = x;
      rep.worst_y = y;
    }
    ++rep.pairs;
  }
  return rep;
}

Regime regime_of(double s, double p) {
  const double sigma = s * p;
  if (std::abs(sigma - 1.0) <= 1e-12) return Regime::Critical;
  return sigma < 1.0 ? Regime::Sub : Regime::Super;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Sub: return "sub";
    case Regime::Critical: return "critical";
    case Regime::Super: return "super";
  }
  return "?";
}

double regime_bound(double R, double s, double p, int n, double c_bar) {
  if (!(R > 1.0)) throw DomainError("regime bound needs R > 1");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("regime bound needs s in (0, 1)");
  const double sigma = s * p;
  switch (regime_of(s, p)) {
    case Regime::Sub: return c_bar / s * std::pow(R, n - sigma) / (1.0 - sigma);
    case Regime::Critical: return c_bar / s * std::pow(R, n - 1) * std::log(R);
    case Regime::Super: return c_bar / s * std::pow(R, n - 1) / (sigma - 1.0);
  }
  return 0.0;
}

BarrierSweep barrier_energy_sweep(const std::vector<double>& R_list, const EnergyParams& params,
                                  const PotentialSpec& spec, double h) {
  if (!(h > 0.0)) throw ConfigError("barrier sweep needs h > 0");
  if (h > 0.25) throw ConfigError("grid spacing " + std::to_string(h) + " does not resolve the unit ramp");
  if (R_list.empty()) throw ConfigError("barrier sweep needs at least one radius");
  params.validate();
  BarrierSweep out;
  out.s = params.s;
  out.p = params.p;
  out.n = params.n;
  out.regime = regime_of(params.s, params.p);
  std::vector<double> rs, es;
  for (double R : R_list) {
    if (!(R >= 2.0)) throw DomainError("barrier sweep needs R >= 2");
    const Field psi = make_psi_field(R, h, params.n);
    const EnergyBreakdown e = total_energy(psi, R + 2.0, params, spec);
    BarrierRow row;
    row.R = R;
    row.energy_kinetic = (1.0 - params.s) * e.kinetic();
    row.energy_potential = e.potential;
    row.F_R = regime_bound(R, params.s, params.p, params.n);
    row.ratio = e.total / row.F_R;
    row.diverged = e.diverged;
    out.rows.push_back(row);
    if (!e.diverged && e.total > 0.0) {
      rs.push_back(R);
      es.push_back(e.total);
    }
  }
  if (rs.size() >= 3) {
    const FitResult fit = fit_exponent(rs, es);
    out.slope = fit.slope;
    out.r_squared = fit.r_squared;
  } else {
    out.slope = std::numeric_limits<double>::quiet_NaN();
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : out.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  out.ratio_spread = hi / lo;
  out.c_bar_envelope = hi;
  return out;
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

BoundCheck minimizer_energy_bound_check(const Field& u, double R, const EnergyParams& params,
                                        const PotentialSpec& spec, bool converged) {
  if (!(R >= 2.0)) throw DomainError("bound check needs R >= 2");
  if (u.grid.box_radius() < R + 2.0 - 1e-9 * R)
    throw DomainError("bound check needs the field to cover B_{R+2}");
  BoundCheck out;
  out.lhs = total_energy(u, R, params, spec).total;
  const Field psi = make_psi_field(R, u.grid.h, u.grid.n);
  out.barrier = total_energy(psi, R + 2.0, params, spec).total;
  out.cross = (1.0 - params.s) * split_interaction(u, R, R + 1.0, params);
  out.rhs = out.barrier + out.cross;
  out.margin = out.rhs - out.lhs;
  if (!converged)
    out.status = CheckStatus::Inconclusive;
  else
    out.status = out.margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  return out;
}

}  // namespace nlphase
