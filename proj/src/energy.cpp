#include "nlphase/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlphase/errors.hpp"
#include "nlphase/format.hpp"
#include "nlphase/parallel.hpp"

namespace nlphase {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;
// Offsets beyond which the 1D second differences are replaced by their
// asymptotic expansion (avoids cancellation).
constexpr int kTaylorOffset1D = 64;
// 2D offsets up to kNear2D use high-order tensor Gauss, up to kModerate2D a
// low-order one, and a corrected midpoint rule beyond.
constexpr int kNear2D = 3;
constexpr int kModerate2D = 40;
// Minimum population of an exterior value class that is pre-aggregated.
constexpr std::size_t kAggregateMin = 32;

double abs_pow(double t, double p) {
  if (t == 0.0) return 0.0;
  if (p == 2.0) return t * t;
  return std::exp(p * std::log(std::fabs(t)));
}

// d/dt |t|^p, with value 0 at t = 0.
double abs_pow_derivative(double t, double p) {
  if (t == 0.0) return 0.0;
  if (p == 2.0) return 2.0 * t;
  const double a = std::fabs(t);
  return std::copysign(p * std::exp((p - 1.0) * std::log(a)), t);
}

// --- 1D offset weights on the unit grid --------------------------------------

// Antiderivative (twice) of |w|^(-1-sigma).
double g_pc(double w, double sigma) {
  const double a = std::fabs(w);
  if (sigma == 1.0) return a == 0.0 ? 0.0 : -std::log(a);
  return -std::pow(a, 1.0 - sigma) / (sigma * (1.0 - sigma));
}

// Antiderivative (twice) of |w|^beta.
double g_beta(double w, double beta) {
  return std::pow(std::fabs(w), beta + 2.0) / ((beta + 1.0) * (beta + 2.0));
}

double pc_weight_1d(int d, double sigma) {
  if (d > kTaylorOffset1D) {
    const double x = d;
    const double a = 1.0 + sigma;
    return std::pow(x, -a) * (1.0 + a * (a + 1.0) / (12.0 * x * x) +
                              a * (a + 1.0) * (a + 2.0) * (a + 3.0) / (360.0 * x * x * x * x));
  }
  return g_pc(d + 1.0, sigma) - 2.0 * g_pc(d, sigma) + g_pc(d - 1.0, sigma);
}

double affine_weight_1d(int d, double sigma, double p) {
  const double beta = p - 1.0 - sigma;
  const double x = d;
  double second;
  if (d > kTaylorOffset1D) {
    second = std::pow(x, beta) * (1.0 + beta * (beta - 1.0) / (12.0 * x * x) +
                                  beta * (beta - 1.0) * (beta - 2.0) * (beta - 3.0) / (360.0 * x * x * x * x));
  } else {
    second = g_beta(x + 1.0, beta) - 2.0 * g_beta(x, beta) + g_beta(x - 1.0, beta);
  }
  return second / std::pow(x, p);
}

// ∫_{cell of width h centred at 0} ∫_t^∞ (τ - ξ)^(-1-σ) dτ dξ.
double cell_ray_mass(double t, double h, double sigma) {
  const double e = h / (2.0 * t);
  if (sigma == 1.0) return std::log1p(e) - std::log1p(-e);
  const double a = 1.0 - sigma;
  const double l1 = std::log1p(e), l2 = std::log1p(-e);
  return std::pow(t, a) * std::exp(a * l2) * std::expm1(a * (l1 - l2)) / (sigma * a);
}

// --- 2D offset weights on the unit grid --------------------------------------

// Linear factor A + B z of the tent 1 - |z - a| on the half [lo, lo + 1].
struct Linear {
  double A, B;
};

Linear tent_half(int a, double lo) {
  if (lo < a) return {1.0 - a, 1.0};  // z in [a - 1, a]
  return {1.0 + a, -1.0};             // z in [a, a + 1]
}

// ∫ over [x0,x0+1]x[y0,y0+1] with one corner at the origin of
// f1(z1) f2(z2) |z|^(-2-sigma), in polar coordinates about that corner.
double polar_corner_quadrant(Linear f1, Linear f2, double sx, double sy, double sigma) {
  // Reflect so the quadrant is [0,1]^2: z1 = sx x, z2 = sy y.
  const double a1 = f1.A, b1 = f1.B * sx;
  const double a2 = f2.A, b2 = f2.B * sy;
  auto phi_integrand = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double r = 1.0 / std::max(c, s);
    // weight = a1 a2 + (a1 b2 s + b1 a2 c) r + b1 b2 c s r^2, times r^(-1-sigma) dr.
    const double t1 = (a1 * b2 * s + b1 * a2 * c) * std::pow(r, 1.0 - sigma) / (1.0 - sigma);
    const double t2 = b1 * b2 * c * s * std::pow(r, 2.0 - sigma) / (2.0 - sigma);
    return t1 + t2;
  };
  return gauss<double, 30>::integrate(phi_integrand, 0.0, kPi / 4) +
         gauss<double, 30>::integrate(phi_integrand, kPi / 4, kPi / 2);
}

template <unsigned N>
double tensor_quadrant(Linear f1, Linear f2, double x0, double y0, double sigma) {
  const double alpha = 2.0 + sigma;
  auto inner = [&](double z1) {
    auto g = [&](double z2) {
      const double w = (f1.A + f1.B * z1) * (f2.A + f2.B * z2);
      return w * std::pow(z1 * z1 + z2 * z2, -alpha / 2.0);
    };
    return gauss<double, N>::integrate(g, y0, y0 + 1.0);
  };
  return gauss<double, N>::integrate(inner, x0, x0 + 1.0);
}

}  // namespace

double unit_pair_weight_2d(int a, int b, double sigma) {
  a = std::abs(a);
  b = std::abs(b);
  if (a == 0 && b == 0) return std::numeric_limits<double>::infinity();
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("2D cell-pair weights need 0 < sp < 1");
  const int far = std::max(a, b);
  if (far > kModerate2D) {
    const double r2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
    const double alpha = 2.0 + sigma;
    return std::pow(r2, -alpha / 2.0) * (1.0 + alpha * alpha / (12.0 * r2));
  }
  double total = 0.0;
  for (int qx = 0; qx < 2; ++qx) {
    for (int qy = 0; qy < 2; ++qy) {
      const double x0 = a - 1 + qx, y0 = b - 1 + qy;
      const Linear f1 = tent_half(a, x0), f2 = tent_half(b, y0);
      const bool corner_x = x0 == 0.0 || x0 + 1.0 == 0.0;
      const bool corner_y = y0 == 0.0 || y0 + 1.0 == 0.0;
      if (corner_x && corner_y) {
        total += polar_corner_quadrant(f1, f2, x0 == 0.0 ? 1.0 : -1.0, y0 == 0.0 ? 1.0 : -1.0, sigma);
      } else if (far <= kNear2D) {
        total += tensor_quadrant<20>(f1, f2, x0, y0, sigma);
      } else {
        total += tensor_quadrant<7>(f1, f2, x0, y0, sigma);
      }
    }
  }
  return total;
}

// --- EnergyParams -------------------------------------------------------------

PairModel EnergyParams::resolved_model() const {
  if (pair_model != PairModel::Auto) return pair_model;
  return sigma() < 1.0 ? PairModel::PiecewiseConstant : PairModel::Affine;
}

void EnergyParams::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
  if (!(p > 1.0)) throw ConfigError("p must exceed 1");
  if (n != 1 && n != 2) throw ConfigError("n must be 1 or 2");
  if (!(tail_factor >= 2.0)) throw ConfigError("tail radius must be at least twice the box radius");
  if (n == 1 && singular_rule != SingularRule::ExactNeighbor1D)
    throw ConfigError("1D energies use the exact-neighbour rule");
  if (n == 2 && singular_rule != SingularRule::PolarDesing2D)
    throw ConfigError("2D energies use the polar desingularised rule");
  const PairModel model = resolved_model();
  if (model == PairModel::PiecewiseConstant && sigma() >= 1.0)
    throw DomainError("piecewise-constant cell pairs have infinite weight for sp >= 1");
  if (model == PairModel::Affine && n != 1) throw DomainError("the affine pair model is implemented in 1D only");
  if (!(divergence_cap == 0.0 || divergence_cap > 1.0)) throw ConfigError("divergence cap must be 0 or > 1");
}

EnergyParams make_energy_params(double s, double p, int n) {
  EnergyParams e;
  e.s = s;
  e.p = p;
  e.n = n;
  e.singular_rule = n == 1 ? SingularRule::ExactNeighbor1D : SingularRule::PolarDesing2D;
  return e;
}

// --- KineticOperator ------------------------------------------------------------

KineticOperator::KineticOperator(const Field& u, double omega_radius, const EnergyParams& params,
                                 double outer_radius)
    : params_(params), grid_(u.grid) {
  params_.validate();
  if (params_.n != grid_.n) throw ConfigError("energy dimension does not match the grid");
  if (u.values.size() != grid_.size()) throw InputError("field size does not match its grid");
  const double b = grid_.box_radius();
  if (!(omega_radius >= 0.0) || omega_radius > b * (1.0 + 1e-12))
    throw DomainError("Ω radius " + format_double(omega_radius) + " must lie within the box radius " + format_double(b));
  if (outer_radius < 0.0) outer_radius = omega_radius;
  if (outer_radius < omega_radius || outer_radius > b * (1.0 + 1e-12))
    throw DomainError("outer radius must lie between Ω radius and the box radius");

  const double h = grid_.h;
  const double sigma = params_.sigma();
  scale_ = std::pow(h, grid_.n - sigma);

  const double w2 = omega_radius * omega_radius * (1.0 + 1e-12);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (static_cast<double>(grid_.radius2_units(i)) * h * h <= w2) {
      omega_.push_back(i);
      omega_coords_.push_back(grid_.coords(i));
    }
  }

  const double tail = std::max({params_.tail_factor * b, b + h, u.exterior.constant_radius() + h});
  const int ring = static_cast<int>(std::ceil(tail / h - 0.5));
  build_tables(ring + grid_.half() + 1);
  build_outside(u, outer_radius);
  build_tail(u);
}

void KineticOperator::build_tables(int max_offset) {
  const double sigma = params_.sigma();
  table_size_ = max_offset + 1;
  if (grid_.n == 1) {
    w1_.assign(table_size_, 0.0);
    const bool affine = params_.resolved_model() == PairModel::Affine;
    for (int d = 1; d < table_size_; ++d)
      w1_[d] = scale_ * (affine ? affine_weight_1d(d, sigma, params_.p) : pc_weight_1d(d, sigma));
    if (affine) nn_extra_ = scale_ * g_beta(1.0, params_.p - 1.0 - sigma) / 2.0;
  } else {
    w2_.assign(static_cast<std::size_t>(table_size_) * table_size_, 0.0);
    parallel_for(static_cast<std::size_t>(table_size_), params_.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t a = lo; a < hi; ++a)
        for (int c = 0; c <= static_cast<int>(a); ++c) {
          if (a == 0 && c == 0) continue;
          const double w = scale_ * unit_pair_weight_2d(static_cast<int>(a), c, sigma);
          w2_[a * table_size_ + c] = w;
        }
    });
    for (int a = 0; a < table_size_; ++a)
      for (int c = a + 1; c < table_size_; ++c) w2_[static_cast<std::size_t>(a) * table_size_ + c] = w2_[static_cast<std::size_t>(c) * table_size_ + a];
  }
}

double KineticOperator::pair_weight(int da, int db) const {
  da = std::abs(da);
  db = std::abs(db);
  if (grid_.n == 1) return w1_[da];
  return w2_[static_cast<std::size_t>(da) * table_size_ + db];
}

void KineticOperator::build_outside(const Field& u, double outer_radius) {
  const double h = grid_.h;
  const double o2 = outer_radius * outer_radius * (1.0 + 1e-12);
  const double tail = std::max({params_.tail_factor * grid_.box_radius(), grid_.box_radius() + h,
                                u.exterior.constant_radius() + h});
  const int ring = static_cast<int>(std::ceil(tail / h - 0.5));

  std::map<double, std::vector<std::array<int, 2>>> classes;
  auto add = [&](int a, int b, double v) { classes[v].push_back({a, b}); };
  const int jb = grid_.n == 2 ? ring : 0;
  for (int a = -ring; a <= ring; ++a) {
    for (int b = -jb; b <= jb; ++b) {
      if (grid_.contains(a, b)) {
        const double r2 = (static_cast<double>(a) * a + static_cast<double>(b) * b) * h * h;
        if (r2 > o2) add(a, b, u.values[grid_.index(a, b)]);
      } else {
        add(a, b, u.exterior(grid_.center_of(a, b)));
      }
    }
  }

  cross_agg_.assign(omega_.size(), {});
  self_agg_.assign(omega_.size(), {});
  std::vector<std::pair<double, const std::vector<std::array<int, 2>>*>> aggregated;
  for (const auto& [value, cells] : classes) {
    if (cells.size() >= kAggregateMin) {
      aggregated.emplace_back(value, &cells);
    } else {
      for (const auto& c : cells) {
        outside_coords_.push_back(c);
        outside_values_.push_back(value);
      }
    }
  }
  parallel_for(omega_.size(), params_.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto xi = omega_coords_[i];
      for (const auto& [value, cells] : aggregated) {
        std::vector<double> parts;
        parts.reserve(cells->size());
        for (const auto& c : *cells) parts.push_back(pair_weight(c[0] - xi[0], c[1] - xi[1]));
        cross_agg_[i].push_back({value, ordered_sum(parts)});
      }
    }
  });

  if (nn_extra_ > 0.0) {
    // Affine self-cell terms whose neighbour lies outside Ω.
    std::vector<bool> in_omega(grid_.size(), false);
    for (auto idx : omega_) in_omega[idx] = true;
    for (std::size_t i = 0; i < omega_.size(); ++i) {
      const int a = omega_coords_[i][0];
      for (int nb : {a - 1, a + 1}) {
        if (grid_.contains(nb, 0) && in_omega[grid_.index(nb, 0)]) continue;
        self_agg_[i].push_back({u.at(nb, 0), nn_extra_});
      }
    }
  }
}

void KineticOperator::build_tail(const Field& u) {
  const double h = grid_.h;
  const double sigma = params_.sigma();
  const double tail = std::max({params_.tail_factor * grid_.box_radius(), grid_.box_radius() + h,
                                u.exterior.constant_radius() + h});
  const int ring = static_cast<int>(std::ceil(tail / h - 0.5));
  const double edge = (ring + 0.5) * h;

  auto merge = [](std::vector<Weighted>& into, double value, double weight) {
    for (auto& w : into)
      if (w.value == value) {
        w.weight += weight;
        return;
      }
    into.push_back({value, weight});
  };

  parallel_for(omega_.size(), params_.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Point x = grid_.center_of(omega_coords_[i][0], omega_coords_[i][1]);
      std::vector<Weighted> acc;
      if (grid_.n == 1) {
        for (double dir : {1.0, -1.0}) {
          const double t0 = edge - dir * x[0];
          const auto pieces = u.exterior.ray_pieces(x, {dir, 0.0}, t0);
          for (std::size_t k = 0; k < pieces.size(); ++k) {
            const double m0 = cell_ray_mass(pieces[k].first, h, sigma);
            const double m1 = k + 1 < pieces.size() ? cell_ray_mass(pieces[k + 1].first, h, sigma) : 0.0;
            merge(acc, pieces[k].second, m0 - m1);
          }
        }
      } else {
        std::vector<double> breaks;
        for (double cx : {edge, -edge})
          for (double cy : {edge, -edge}) breaks.push_back(std::atan2(cy - x[1], cx - x[0]));
        if (u.exterior.kind() == Exterior::Kind::TwoPhase)
          for (double cy : {edge, -edge}) breaks.push_back(std::atan2(cy - x[1], -x[0]));
        for (auto& t : breaks)
          if (t < 0.0) t += 2.0 * kPi;
        std::sort(breaks.begin(), breaks.end());
        breaks.push_back(breaks.front() + 2.0 * kPi);
        const double area = h * h;
        for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
          if (breaks[seg + 1] <= breaks[seg]) continue;
          auto per_angle = [&](double phi, double wphi) {
            const Point dir{std::cos(phi), std::sin(phi)};
            double t_exit = std::numeric_limits<double>::infinity();
            for (int ax = 0; ax < 2; ++ax) {
              if (dir[ax] > 0.0) t_exit = std::min(t_exit, (edge - x[ax]) / dir[ax]);
              if (dir[ax] < 0.0) t_exit = std::min(t_exit, (-edge - x[ax]) / dir[ax]);
            }
            const auto pieces = u.exterior.ray_pieces(x, dir, t_exit);
            for (std::size_t k = 0; k < pieces.size(); ++k) {
              const double m0 = std::pow(pieces[k].first, -sigma);
              const double m1 = k + 1 < pieces.size() ? std::pow(pieces[k + 1].first, -sigma) : 0.0;
              merge(acc, pieces[k].second, wphi * area * (m0 - m1) / sigma);
            }
          };
          // Gauss–Legendre on the segment, accumulated node by node.
          const double lo_t = breaks[seg], hi_t = breaks[seg + 1];
          const double half = (hi_t - lo_t) / 2.0, mid = (hi_t + lo_t) / 2.0;
          const auto& xs = gauss<double, 20>::abscissa();
          const auto& ws = gauss<double, 20>::weights();
          for (std::size_t q = 0; q < xs.size(); ++q) {
            if (xs[q] == 0.0) {
              per_angle(mid, half * ws[q]);
            } else {
              per_angle(mid + half * xs[q], half * ws[q]);
              per_angle(mid - half * xs[q], half * ws[q]);
            }
          }
        }
      }
      for (const auto& w : acc) merge(cross_agg_[i], w.value, w.weight);
    }
  });
}

std::pair<double, double> KineticOperator::evaluate(std::span<const double> values) const {
  const double p = params_.p;
  const std::size_t m = omega_.size();
  std::vector<double> interior(m, 0.0), cross(m, 0.0);
  const double nn_pair = 2.0 * nn_extra_;
  parallel_for(m, params_.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double ui = values[omega_[i]];
      const auto xi = omega_coords_[i];
      double acc = 0.0;
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = ui - values[omega_[j]];
        if (d == 0.0) continue;
        const int da = omega_coords_[j][0] - xi[0], db = omega_coords_[j][1] - xi[1];
        double w = pair_weight(da, db);
        if (nn_pair > 0.0 && std::abs(da) == 1) w += nn_pair;
        acc += w * abs_pow(d, p);
      }
      for (const auto& s : self_agg_[i]) acc += s.weight * abs_pow(ui - s.value, p);
      interior[i] = acc;

      double cacc = 0.0;
      for (std::size_t j = 0; j < outside_values_.size(); ++j) {
        const double d = ui - outside_values_[j];
        if (d == 0.0) continue;
        cacc += pair_weight(outside_coords_[j][0] - xi[0], outside_coords_[j][1] - xi[1]) * abs_pow(d, p);
      }
      for (const auto& c : cross_agg_[i]) cacc += c.weight * abs_pow(ui - c.value, p);
      cross[i] = cacc;
    }
  });
  return {ordered_sum(interior), ordered_sum(cross)};
}

void KineticOperator::gradient(std::span<const double> values, std::span<double> grad) const {
  const double p = params_.p;
  const std::size_t m = omega_.size();
  std::fill(grad.begin(), grad.end(), 0.0);
  const double nn_pair = 2.0 * nn_extra_;
  parallel_for(m, params_.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double ui = values[omega_[i]];
      const auto xi = omega_coords_[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double d = ui - values[omega_[j]];
        if (d == 0.0) continue;
        const int da = omega_coords_[j][0] - xi[0], db = omega_coords_[j][1] - xi[1];
        double w = pair_weight(da, db);
        if (nn_pair > 0.0 && std::abs(da) == 1) w += nn_pair;
        acc += w * abs_pow_derivative(d, p);
      }
      for (const auto& s : self_agg_[i]) acc += s.weight * abs_pow_derivative(ui - s.value, p);
      for (std::size_t j = 0; j < outside_values_.size(); ++j) {
        const double d = ui - outside_values_[j];
        if (d == 0.0) continue;
        acc += pair_weight(outside_coords_[j][0] - xi[0], outside_coords_[j][1] - xi[1]) * abs_pow_derivative(d, p);
      }
      for (const auto& c : cross_agg_[i]) acc += c.weight * abs_pow_derivative(ui - c.value, p);
      grad[omega_[i]] = acc;
    }
  });
}

// --- Energies -------------------------------------------------------------------

namespace {

EnergyBreakdown kinetic_once(const Field& u, double omega_radius, const EnergyParams& params) {
  KineticOperator op(u, omega_radius, params);
  const auto [interior, cross] = op.evaluate(u.values);
  EnergyBreakdown e;
  e.kinetic_interior = interior;
  e.kinetic_cross = cross;
  return e;
}

}  // namespace

EnergyBreakdown kinetic_energy(const Field& u, double omega_radius, const EnergyParams& params) {
  EnergyBreakdown e = kinetic_once(u, omega_radius, params);
  if (params.sigma() >= 1.0 && params.divergence_cap > 0.0 && u.profile && e.kinetic() > 0.0) {
    const Field fine = refine(u, 2);
    const EnergyBreakdown f = kinetic_once(fine, omega_radius, params);
    e.refinement_ratio = f.kinetic() / e.kinetic();
    if (e.refinement_ratio > params.divergence_cap) {
      e.diverged = true;
      e.kinetic_interior = std::numeric_limits<double>::infinity();
      e.kinetic_cross = std::numeric_limits<double>::infinity();
    }
  }
  e.total = (1.0 - params.s) * e.kinetic();
  return e;
}

EnergyBreakdown total_energy(const Field& u, double omega_radius, const EnergyParams& params,
                             const PotentialSpec& spec) {
  EnergyBreakdown e = kinetic_energy(u, omega_radius, params);
  const double r2 = omega_radius * omega_radius * (1.0 + 1e-12);
  std::vector<double> parts;
  for (std::size_t i = 0; i < u.grid.size(); ++i)
    if (static_cast<double>(u.grid.radius2_units(i)) * u.grid.h * u.grid.h <= r2)
      parts.push_back(eval_potential(spec, u.values[i]));
  e.potential = ordered_sum(parts) * u.grid.cell_volume();
  e.total = (1.0 - params.s) * e.kinetic() + e.potential;
  return e;
}

double split_interaction(const Field& u, double inner_radius, double outer_radius, const EnergyParams& params) {
  KineticOperator op(u, inner_radius, params, outer_radius);
  return op.evaluate(u.values).second;
}

double full_seminorm(const Field& u, const EnergyParams& params) {
  if (!u.exterior.is_constant()) throw DomainError("full seminorm needs a constant exterior");
  const double b = u.grid.box_radius();
  const double c = u.exterior.parameter();
  const double b2 = b * b * (1.0 + 1e-12);
  for (std::size_t i = 0; i < u.grid.size(); ++i)
    if (static_cast<double>(u.grid.radius2_units(i)) * u.grid.h * u.grid.h > b2 && u.values[i] != c)
      throw DomainError("full seminorm needs u equal to its exterior value outside the inscribed ball");
  EnergyParams local = params;
  local.divergence_cap = 0.0;
  const EnergyBreakdown e = kinetic_energy(u, b, local);
  return 2.0 * e.kinetic();
}

// --- Interaction functional and kernel bounds ------------------------------------

namespace {

// Distance from a point at radius rho to the circle of radius a along the
// direction at angle theta from its position vector, in a cancellation-free form.
double ray_to_circle(double rho, double a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double root = std::sqrt(std::max(a * a - rho * rho * s * s, 0.0));
  const double denom = root + rho * c;
  if (denom > 0.0) return (a - rho) * (a + rho) / denom;
  return root - rho * c;
}

// (1/σ) ∫_0^{2π} d(θ)^(-σ) dθ for a point at radius rho inside B_a.
double circle_tail_2d(double rho, double a, double sigma) {
  auto f = [&](double theta) { return std::pow(ray_to_circle(rho, a, theta), -sigma); };
  const double v = gauss_kronrod<double, 61>::integrate(f, 0.0, kPi, 20, 1e-12);
  return 2.0 * v / sigma;
}

}  // namespace

double interaction_L(double r2, double r1, const EnergyParams& params) {
  if (!(r2 > 0.0)) throw DomainError("interaction_L needs r2 > 0");
  if (!(r1 >= 0.0)) throw DomainError("interaction_L needs r1 >= 0");
  const double sigma = params.sigma();
  if (r1 == 0.0) return std::numeric_limits<double>::infinity();
  if (params.n == 1) {
    if (sigma == 1.0) return (2.0 / sigma) * std::log((2.0 * r2 + r1) / r1);
    return (2.0 / sigma) * (std::pow(r1, 1.0 - sigma) - std::pow(2.0 * r2 + r1, 1.0 - sigma)) / (sigma - 1.0);
  }
  if (params.n != 2) throw DomainError("interaction_L is implemented for n = 1, 2");
  const double a = r2 + r1;
  auto outer = [&](double rho) { return 2.0 * kPi * rho * circle_tail_2d(rho, a, sigma); };
  return gauss_kronrod<double, 61>::integrate(outer, 0.0, r2, 20, 1e-11);
}

double interaction_delta(int n, double p) { return std::min(std::pow(2.0, -n), std::pow(2.0, -n + 2.0 - p)); }

double interaction_lower_bound(double R, double r, double s, double p, int n) {
  const double delta = interaction_delta(n, p);
  if (!(R > 0.0)) throw DomainError("interaction bound needs R > 0");
  if (!(r > 0.0 && r < delta * R)) throw DomainError("interaction bound needs r in (0, δR)");
  const double sigma = s * p;
  if (std::abs(sigma - 1.0) <= 1e-12) return delta * std::pow(R, n - 1) * std::log(R / r);
  if (sigma < 1.0) return delta * std::pow(R, n - sigma);
  return delta * std::pow(R, n - sigma) * std::pow(r / R, 1.0 - sigma);
}

double cone_lower_bound(double x_norm, double R, double sigma, int n, double m_aperture) {
  if (!(x_norm >= 0.0 && x_norm < R)) throw DomainError("cone bound needs 0 <= |x| < R");
  if (!(sigma > 0.0) || !(m_aperture > 0.0)) throw DomainError("cone bound needs sigma > 0 and m > 0");
  const double m = m_aperture;
  const double c = std::pow(2.0 * m, n - 1) / (sigma * std::pow((n - 1) * m * m + 1.0, (n + sigma) / 2.0));
  return c * std::pow(R - x_norm, -sigma);
}

double exterior_kernel_mass(double x_norm, double R, double sigma, int n) {
  if (!(x_norm >= 0.0 && x_norm < R)) throw DomainError("kernel mass needs 0 <= |x| < R");
  if (n == 1) return (std::pow(R - x_norm, -sigma) + std::pow(R + x_norm, -sigma)) / sigma;
  if (n == 2) return circle_tail_2d(x_norm, R, sigma);
  throw DomainError("kernel mass is implemented for n = 1, 2");
}

double knp_closed_form(int n, double p) {
  return 2.0 * std::pow(kPi, (n - 1) / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::tgamma((n + p) / 2.0);
}

double knp_constant(int n, double p) {
  if (n < 1) throw DomainError("K_{n,p} needs n >= 1");
  if (!(p > 0.0)) throw DomainError("K_{n,p} needs p > 0");
  if (n == 1) return 2.0;
  if (n == 2) {
    auto f = [p](double t) { return std::pow(std::cos(t), p); };
    return 4.0 * gauss_kronrod<double, 61>::integrate(f, 0.0, kPi / 2.0, 20, 1e-15);
  }
  return knp_closed_form(n, p);
}

double local_energy(const Field& u, double omega_radius, double p, const PotentialSpec& spec) {
  const Grid& g = u.grid;
  if (omega_radius > g.box_radius() * (1.0 + 1e-12)) throw DomainError("Ω radius exceeds the box");
  const double r2 = omega_radius * omega_radius * (1.0 + 1e-12);
  std::vector<double> kin, pot;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (static_cast<double>(g.radius2_units(i)) * g.h * g.h > r2) continue;
    const auto c = g.coords(i);
    const double gx = (u.at(c[0] + 1, c[1]) - u.at(c[0] - 1, c[1])) / (2.0 * g.h);
    double grad2 = gx * gx;
    if (g.n == 2) {
      const double gy = (u.at(c[0], c[1] + 1) - u.at(c[0], c[1] - 1)) / (2.0 * g.h);
      grad2 += gy * gy;
    }
    kin.push_back(grad2 == 0.0 ? 0.0 : std::pow(grad2, p / 2.0));
    pot.push_back(eval_potential(spec, u.values[i]));
  }
  const double vol = g.cell_volume();
  return knp_constant(g.n, p) / (2.0 * p) * ordered_sum(kin) * vol + ordered_sum(pot) * vol;
}

double c_hat_p(double p) {
  if (!(p > 1.0)) throw DomainError("c_hat_p needs p > 1");
  if (p >= 2.0) return std::pow(2.0, 1.0 - p);
  return 3.0 * p * (p - 1.0) / std::pow(4.0, 4.0 - p);
}

}  // namespace nlphase
