#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlphase/fields.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

enum class SingularRule { ExactNeighbor1D, PolarDesing2D };

// How |u(x) - u(y)|^p is modelled on a pair of cells.
//   PiecewiseConstant: u constant on cells, kernel integrated exactly over the
//     cell product. Finite only for sp < 1.
//   Affine: the difference is spread linearly across the pair, which keeps
//     the near-diagonal integral finite for sp >= 1 (1D only).
//   Auto: PiecewiseConstant for sp < 1, Affine otherwise.
enum class PairModel { Auto, PiecewiseConstant, Affine };

struct EnergyParams {
  double s = 0.5;
  double p = 2.0;
  int n = 1;
  // The exterior is gridded out to tail_factor * box_radius, and integrated
  // in closed form beyond.
  double tail_factor = 2.0;
  SingularRule singular_rule = SingularRule::ExactNeighbor1D;
  PairModel pair_model = PairModel::Auto;
  // For sp >= 1 and fields with a known profile, the energy is recomputed at
  // h/2 and flagged divergent when it grows by more than this factor. 0
  // disables the check.
  double divergence_cap = 1.15;
  int threads = 1;

  double sigma() const { return s * p; }
  PairModel resolved_model() const;
  void validate() const;
};

// Parameters with the singular rule matching the dimension.
EnergyParams make_energy_params(double s, double p, int n);

struct EnergyBreakdown {
  double kinetic_interior = 0.0;  // 1/2 ∫_Ω∫_Ω
  double kinetic_cross = 0.0;     // ∫_Ω∫_{R^n \ Ω}
  double potential = 0.0;
  double total = 0.0;
  bool diverged = false;
  double refinement_ratio = 0.0;  // kinetic(h/2) / kinetic(h) when checked

  double kinetic() const { return kinetic_interior + kinetic_cross; }
  // ∫_Ω∫_{R^n}: the interior part counted in both orders.
  double inner_form() const { return 2.0 * kinetic_interior + kinetic_cross; }
};

// Discrete kinetic functional for one grid, domain Ω = B_omega and frozen
// data outside Ω. The cross term pairs Ω with cells whose centre lies beyond
// `outer_radius` (default: omega_radius), gridded out to the tail radius and
// closed form beyond.
class KineticOperator {
 public:
  KineticOperator(const Field& u, double omega_radius, const EnergyParams& params, double outer_radius = -1.0);

  const std::vector<std::size_t>& omega_cells() const { return omega_; }
  const EnergyParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }

  // Interior and cross parts. `values` is indexed like the grid; only the
  // entries of Ω cells are read.
  std::pair<double, double> evaluate(std::span<const double> values) const;

  // d/du_i of interior + cross for i in Ω, zero elsewhere.
  void gradient(std::span<const double> values, std::span<double> grad) const;

 private:
  struct Weighted {
    double value;
    double weight;
  };
  double pair_weight(int da, int db) const;
  void build_tables(int max_offset);
  void build_outside(const Field& u, double outer_radius);
  void build_tail(const Field& u);

  EnergyParams params_;
  Grid grid_;
  double scale_ = 1.0;     // h^(n - sp)
  double nn_extra_ = 0.0;  // affine self-cell weight per nearest-neighbour pair
  std::vector<double> w1_;  // 1D offset weights (h = 1)
  std::vector<double> w2_;  // 2D offset weights (h = 1), row-major in |da|, |db|
  int table_size_ = 0;

  std::vector<std::size_t> omega_;
  std::vector<std::array<int, 2>> omega_coords_;
  std::vector<std::array<int, 2>> outside_coords_;  // pairwise outside cells
  std::vector<double> outside_values_;
  std::vector<std::vector<Weighted>> cross_agg_;  // per Ω cell, grouped by value
  std::vector<std::vector<Weighted>> self_agg_;   // affine self terms with outside neighbours
};

// Kinetic parts of the energy (potential left at 0).
EnergyBreakdown kinetic_energy(const Field& u, double omega_radius, const EnergyParams& params);

EnergyBreakdown total_energy(const Field& u, double omega_radius, const EnergyParams& params,
                             const PotentialSpec& spec);

// ∫_{B_inner} ∫_{R^n \ B_outer} |u(x) - u(y)|^p / |x - y|^(n+sp).
double split_interaction(const Field& u, double inner_radius, double outer_radius, const EnergyParams& params);

// ∫∫_{R^n x R^n} for a field whose exterior is constant and equal to the
// field near the box boundary.
double full_seminorm(const Field& u, const EnergyParams& params);

// L(B_r2, R^n \ B_{r2 + r1}) for n = 1, 2.
double interaction_L(double r2, double r1, const EnergyParams& params);

// δ = min{2^-n, 2^(-n+2-p)}.
double interaction_delta(int n, double p);

// Three-regime lower bound for L(B_R, R^n \ B_{R+r}), r in (0, δR):
// δR^(n-sp), δR^(n-1) log(R/r), δR^(n-sp) (r/R)^(1-sp) for sp <, =, > 1.
double interaction_lower_bound(double R, double r, double s, double p, int n);

// Cone lower bound for ∫_{R^n \ B_R} |x - y|^(-n-sigma) dy at |x| = x_norm.
double cone_lower_bound(double x_norm, double R, double sigma, int n, double m_aperture);

// ∫_{R^n \ B_R} |x - y|^(-n-sigma) dy by quadrature, n = 1, 2.
double exterior_kernel_mass(double x_norm, double R, double sigma, int n);

// ∫_{∂B_1} |ω·e_1|^p dH^(n-1): 2 for n = 1, quadrature for n = 2, closed form otherwise.
double knp_constant(int n, double p);
double knp_closed_form(int n, double p);

// (K_{n,p} / 2p) Σ|∇u|^p h^n + Σ W(u) h^n over Ω with central differences.
double local_energy(const Field& u, double omega_radius, double p, const PotentialSpec& spec);

// 2^(1-p) for p >= 2, 3p(p-1)/4^(4-p) for p in (1, 2).
double c_hat_p(double p);

// Offset weights ∫_{cell 0}∫_{cell (a,b)} |x - y|^(-2-sigma) dx dy on the unit grid.
double unit_pair_weight_2d(int a, int b, double sigma);

}  // namespace nlphase
