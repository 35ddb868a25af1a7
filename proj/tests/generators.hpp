#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nlphase/fields.hpp"

namespace nlphase::testing {

// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  // Values uniform in [-1, 1] on every cell.
  Field random_field(int n, double h, double box, const Exterior& ext) {
    Field u;
    u.grid = Grid::centered(n, h, box);
    u.exterior = ext;
    u.values.resize(u.grid.size());
    for (double& v : u.values) v = uniform(-1.0, 1.0);
    return u;
  }

  // Smooth random profile: a few random cosine modes, clamped to [-1, 1].
  Field smooth_field(int n, double h, double box, const Exterior& ext) {
    const int modes = integer(1, 3);
    std::vector<std::array<double, 4>> m(modes);
    for (auto& c : m) c = {uniform(-0.6, 0.6), uniform(0.5, 3.0), uniform(0.5, 3.0), uniform(0.0, 6.28)};
    Profile f = [m](const Point& x) {
      double v = 0.0;
      for (const auto& c : m) v += c[0] * std::cos(c[1] * x[0] + c[2] * x[1] + c[3]);
      return v;
    };
    return make_field(Grid::centered(n, h, box), f, ext);
  }

  // Values in [base, 1] inside B_{support}, `base` elsewhere, exterior `base`.
  Field compact_field(int n, double h, double box, double support, double base) {
    Field u;
    u.grid = Grid::centered(n, h, box);
    u.exterior = Exterior::constant(base);
    u.values.assign(u.grid.size(), base);
    for (std::size_t i = 0; i < u.grid.size(); ++i)
      if (norm(u.grid.center(i)) <= support) u.values[i] = uniform(base, 1.0);
    return u;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace nlphase::testing
