#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nlphase {

using Point = std::array<double, 2>;  // second coordinate is 0 in 1D

inline double norm(const Point& x) { return std::hypot(x[0], x[1]); }

// Uniform cell-centred grid on a box around the origin. Cell (i, j) has centre
// ((i - c) h, (j - c) h) with c = (cells - 1) / 2, so the origin is a centre
// and the cells tile [-b - h/2, b + h/2]^n with b = box_radius().
struct Grid {
  int n = 1;
  double h = 0.0;
  int cells = 1;  // per axis, odd

  // Grid whose outermost centres sit at +-box_radius (rounded to the nearest
  // multiple of h).
  static Grid centered(int n, double h, double box_radius);

  double box_radius() const { return h * (cells - 1) / 2; }
  int half() const { return (cells - 1) / 2; }
  std::size_t size() const;
  double cell_volume() const;

  // Integer offsets from the centre cell; j is 0 in 1D.
  std::array<int, 2> coords(std::size_t idx) const;
  std::size_t index(int a, int b) const;
  bool contains(int a, int b) const;
  Point center(std::size_t idx) const;
  Point center_of(int a, int b) const { return {a * h, b * h}; }
  // Squared distance of the centre from the origin in units of h^2 (exact).
  long long radius2_units(std::size_t idx) const;
};

// Data prescribed outside the computational box.
class Exterior {
 public:
  enum class Kind { Constant, TwoPhase, Psi };

  static Exterior constant(double value);
  // +1 where x_1 > 0 and -1 where x_1 < 0.
  static Exterior two_phase();
  // The radial barrier -1 + 2 min{(|x| - R - 1)^+, 1}.
  static Exterior psi(double R);

  // Parses `const:<v>`, `sign`, `psi:<R>`.
  static Exterior parse(std::string_view token);
  std::string token() const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  double operator()(const Point& x) const;

  // Values met along the ray x + t dir for t >= t0, as (t_start, value) pieces
  // in increasing t. Only valid where the exterior is piecewise constant along
  // rays, i.e. beyond `constant_radius()` for Psi.
  std::vector<std::pair<double, double>> ray_pieces(const Point& x, const Point& dir, double t0) const;

  // Radius beyond which the value depends on direction only.
  double constant_radius() const;

  friend bool operator==(const Exterior& a, const Exterior& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_;
  }

 private:
  Exterior(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_ = Kind::Constant;
  double param_ = -1.0;
};

using Profile = std::function<double(const Point&)>;

struct Field {
  Grid grid;
  std::vector<double> values;
  Exterior exterior = Exterior::constant(-1.0);
  // Closed form the values were sampled from, when known. Used to resample
  // the field on refined grids.
  Profile profile;
  int clamp_count = 0;

  // Value at integer cell offsets; falls back to the exterior data outside the box.
  double at(int a, int b) const;
};

// Samples `profile` at cell centres, clamping to [-1, 1]. Throws InputError on NaN.
Field make_field(const Grid& grid, Profile profile, const Exterior& exterior);

// Same field sampled on a grid with spacing h / factor and the same box. A
// field without a profile is resampled by multilinear interpolation.
Field refine(const Field& u, int factor);

// Measure of B_radius ∩ {u > threshold} with the field constant on cells and
// a cell counted when its centre lies in the closed ball.
double level_set_volume(const Field& u, double threshold, double radius);

// Cell-sum of |1 + u|^m over {theta_lo < u <= theta_hi} ∩ B_radius.
double interface_integral(const Field& u, double theta_lo, double theta_hi, double radius, double m);

// Sorts the cell values in decreasing order and deals them out to cells in
// order of increasing |x| (ties broken by index). Requires a constant exterior
// equal to the minimum of the field and a support away from the box boundary.
Field symmetric_decreasing_rearrangement(const Field& u);

// Text round trip: header `n h box_radius exterior`, then `index value` lines.
void write_field(std::ostream& out, const Field& u);
Field read_field(std::istream& in);

}  // namespace nlphase
