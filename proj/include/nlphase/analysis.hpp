#pragma once

#include <vector>

#include "nlphase/energy.hpp"
#include "nlphase/fields.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of log y on log x. Needs >= 3 pairs of positive values.
FitResult fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

struct DensityRow {
  double r = 0.0;
  double volume = 0.0;     // |B_r ∩ {u > θ2}|
  double interface = 0.0;  // ∫_{B_r ∩ {θ_* < u <= θ^*}} |1 + u|^m
  double lhs = 0.0;
  double lhs_over_rn = 0.0;
  // Full scans only: E(u, B_r), λ_{θ^*}^{-1} E(u, B_r) - interface.
  double energy = 0.0;
  double reabsorption_margin = 0.0;
};

struct DensityScan {
  double theta1 = 0.0, theta2 = 0.0;
  double theta_star = 0.0, theta_sup = 0.0;
  double band_weight = 0.0;  // c_{m,θ_*} = (1 + θ_*)^(-m); 0 for volume-only scans
  double r0 = 0.0, c0 = 0.0, seed_volume = 0.0;
  bool volume_only = false;
  std::vector<DensityRow> rows;
  FitResult fit;
  double c_tilde_hat = 0.0;  // min over rows of lhs / r^n
  double lambda_sup = 0.0;   // λ_{θ^*} of the strengthened lower bound (full scans)
};

struct DensityOptions {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double c0 = 0.0;              // seed: |B_{r0} ∩ {u > θ1}| must exceed c0
  double omega_radius = -1.0;   // defaults to the box radius
};

// c |interface| + |B_r ∩ {u > θ2}| > c̃ r^n for radii with B_{3r} ⊂ Ω.
DensityScan density_scan(const Field& u, const PotentialSpec& spec, const std::vector<double>& radii,
                         const DensityOptions& opts = {});

// Volume-only scan for radii with B_{4r} ⊂ Ω, plus the reabsorption margin
// λ_{θ^*}^{-1} E(u, B_r) - ∫_{band} |1 + u|^m at every radius.
DensityScan full_density_scan(const Field& u, const PotentialSpec& spec, const EnergyParams& params,
                              const std::vector<double>& radii, const DensityOptions& opts = {});

struct GammaRow {
  double s = 0.0;
  double measured = 0.0;  // (1-s) ∫_Ω∫_{R^n}
  double limit = 0.0;     // (K_{n,p}/p) ∫_Ω |∇v|^p on the same grid
  double rel_err = 0.0;
  double energy_s = 0.0;  // E_s^p(v, Ω)
  double energy_1 = 0.0;  // E_1^p(v, Ω)
  bool resolution_flag = false;  // s > 1 - 4h
  bool diverged = false;
};

struct GammaSweep {
  double p = 2.0;
  std::vector<GammaRow> rows;
  // Relative errors nonincreasing over the last three unflagged rows.
  bool tail_monotone = false;
};

GammaSweep gamma_sweep(const Field& v, double omega_radius, double p, const std::vector<double>& s_list,
                       const PotentialSpec& spec, int threads = 1);

}  // namespace nlphase
