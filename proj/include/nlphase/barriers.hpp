#pragma once

#include <cstdint>
#include <vector>

#include "nlphase/energy.hpp"
#include "nlphase/fields.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

// ψ(x) = -1 + 2 min{(|x| - R - 1)^+, 1}.
double eval_psi(double R, double x_norm);
double eval_psi(double R, const Point& x);

// d(x) = max{R - |x|, 1}.
double eval_d(double R, double x_norm);
double eval_d(double R, const Point& x);

Field make_psi_field(double R, double h, int n);

struct LipschitzReport {
  double worst_deficit = 0.0;  // max of lhs - rhs, must be <= 0
  int pairs = 0;
  Point worst_x{};
  Point worst_y{};
};

// Seeded random pairs in [-(R+3), R+3]^n checking
// |ψ(x) - ψ(y)| <= 2|x - y| / d(x) when |x - y| < d(x), and <= 2 otherwise.
LipschitzReport lipschitz_bound_check(double R, int samples, const EnergyParams& params, std::uint64_t seed = 1);

enum class Regime { Sub, Critical, Super };

// Sub for sp < 1, Critical for sp = 1 (to 1e-12), Super for sp > 1.
Regime regime_of(double s, double p);
const char* regime_name(Regime r);

// Regime envelope (C̄/s) {R^(n-sp)/(1-sp), R^(n-1) log R, R^(n-1)/(sp-1)}.
double regime_bound(double R, double s, double p, int n, double c_bar = 1.0);

struct BarrierRow {
  double R = 0.0;
  double energy_kinetic = 0.0;    // (1-s) K(ψ, B_{R+2})
  double energy_potential = 0.0;  // ∫_{B_{R+2}} W(ψ)
  double F_R = 0.0;
  double ratio = 0.0;             // energy / F(R)
  bool diverged = false;
};

struct BarrierSweep {
  double s = 0.0, p = 0.0;
  int n = 1;
  Regime regime = Regime::Sub;
  std::vector<BarrierRow> rows;
  double slope = 0.0;         // fitted exponent of the energy in R
  double r_squared = 0.0;
  double ratio_spread = 0.0;  // max ratio / min ratio
  double c_bar_envelope = 0.0;  // max ratio
};

// Energy of ψ on B_{R+2} for each R, on grids of spacing h.
BarrierSweep barrier_energy_sweep(const std::vector<double>& R_list, const EnergyParams& params,
                                  const PotentialSpec& spec, double h);

enum class CheckStatus { Pass, Fail, Inconclusive };
const char* status_name(CheckStatus s);

struct BoundCheck {
  CheckStatus status = CheckStatus::Inconclusive;
  double lhs = 0.0;      // E(u, B_R)
  double barrier = 0.0;  // E(ψ, B_{R+2})
  double cross = 0.0;    // (1-s) ∫_{B_R}∫_{R^n \ B_{R+1}}
  double rhs = 0.0;
  double margin = 0.0;   // rhs - lhs
};

// E(u, B_R) <= E(ψ, B_{R+2}) + (1-s) u(B_R, R^n \ B_{R+1}) for a minimizer on
// B_{R+2}. A run that did not converge gives Inconclusive.
BoundCheck minimizer_energy_bound_check(const Field& u, double R, const EnergyParams& params,
                                        const PotentialSpec& spec, bool converged = true);

}  // namespace nlphase
