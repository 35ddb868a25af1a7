#include "nlphase/fields.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nlphase/errors.hpp"
#include "nlphase/format.hpp"

namespace nlphase {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Relative slack used when testing whether a centre lies in a closed ball.
constexpr double kBallSlack = 1e-12;

bool in_ball(const Grid& g, std::size_t idx, double radius) {
  const double r2 = static_cast<double>(g.radius2_units(idx)) * g.h * g.h;
  return r2 <= radius * radius * (1.0 + kBallSlack);
}

void require_radius(const Grid& g, double radius) {
  if (!(radius >= 0.0)) throw DomainError("radius must be nonnegative");
  if (radius > g.box_radius() * (1.0 + kBallSlack))
    throw DomainError("radius " + format_double(radius) + " exceeds the box radius " + format_double(g.box_radius()));
}

}  // namespace

// --- Grid -------------------------------------------------------------------

Grid Grid::centered(int n, double h, double box_radius) {
  if (n != 1 && n != 2) throw ConfigError("only n = 1 and n = 2 grids are supported");
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!(box_radius >= 0.0)) throw ConfigError("box radius must be nonnegative");
  Grid g;
  g.n = n;
  g.h = h;
  g.cells = 2 * static_cast<int>(std::llround(box_radius / h)) + 1;
  return g;
}

std::size_t Grid::size() const {
  const auto c = static_cast<std::size_t>(cells);
  return n == 1 ? c : c * c;
}

double Grid::cell_volume() const { return n == 1 ? h : h * h; }

std::array<int, 2> Grid::coords(std::size_t idx) const {
  if (n == 1) return {static_cast<int>(idx) - half(), 0};
  const auto c = static_cast<std::size_t>(cells);
  return {static_cast<int>(idx / c) - half(), static_cast<int>(idx % c) - half()};
}

std::size_t Grid::index(int a, int b) const {
  if (n == 1) return static_cast<std::size_t>(a + half());
  return static_cast<std::size_t>(a + half()) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(b + half());
}

bool Grid::contains(int a, int b) const {
  const int k = half();
  if (a < -k || a > k) return false;
  if (n == 1) return b == 0;
  return b >= -k && b <= k;
}

Point Grid::center(std::size_t idx) const {
  const auto c = coords(idx);
  return center_of(c[0], c[1]);
}

long long Grid::radius2_units(std::size_t idx) const {
  const auto c = coords(idx);
  return static_cast<long long>(c[0]) * c[0] + static_cast<long long>(c[1]) * c[1];
}

// --- Exterior ---------------------------------------------------------------

Exterior Exterior::constant(double value) {
  if (!(std::fabs(value) <= 1.0)) throw InputError("constant exterior must lie in [-1, 1]");
  return Exterior(Kind::Constant, value);
}

Exterior Exterior::two_phase() { return Exterior(Kind::TwoPhase, 0.0); }

Exterior Exterior::psi(double R) {
  if (!(R > 0.0)) throw InputError("psi exterior needs R > 0");
  return Exterior(Kind::Psi, R);
}

Exterior Exterior::parse(std::string_view token) {
  if (token == "sign") return two_phase();
  if (token.rfind("const:", 0) == 0) return constant(parse_double(token.substr(6)));
  if (token.rfind("psi:", 0) == 0) return psi(parse_double(token.substr(4)));
  throw InputError("unknown exterior '" + std::string(token) + "' (expected const:<v>, sign or psi:<R>)");
}

std::string Exterior::token() const {
  switch (kind_) {
    case Kind::Constant:
      return "const:" + format_double(param_);
    case Kind::TwoPhase:
      return "sign";
    case Kind::Psi:
      return "psi:" + format_double(param_);
  }
  return {};
}

double Exterior::operator()(const Point& x) const {
  switch (kind_) {
    case Kind::Constant:
      return param_;
    case Kind::TwoPhase:
      return sign_of(x[0]);
    case Kind::Psi: {
      const double t = std::max(norm(x) - param_ - 1.0, 0.0);
      return -1.0 + 2.0 * std::min(t, 1.0);
    }
  }
  return 0.0;
}

double Exterior::constant_radius() const {
  switch (kind_) {
    case Kind::Psi:
      return param_ + 2.0;
    default:
      return 0.0;
  }
}

std::vector<std::pair<double, double>> Exterior::ray_pieces(const Point& x, const Point& dir, double t0) const {
  switch (kind_) {
    case Kind::Constant:
      return {{t0, param_}};
    case Kind::Psi: {
      const Point y{x[0] + t0 * dir[0], x[1] + t0 * dir[1]};
      if (norm(y) < constant_radius() * (1.0 - 1e-12))
        throw DomainError("psi exterior queried inside its ramp");
      return {{t0, 1.0}};
    }
    case Kind::TwoPhase: {
      const double y0 = x[0] + t0 * dir[0];
      const double first = y0 != 0.0 ? sign_of(y0) : sign_of(dir[0]);
      std::vector<std::pair<double, double>> out{{t0, first}};
      if (dir[0] != 0.0) {
        const double cross = -x[0] / dir[0];
        if (cross > t0 && sign_of(dir[0]) != first) out.emplace_back(cross, sign_of(dir[0]));
      }
      return out;
    }
  }
  return {};
}

// --- Field ------------------------------------------------------------------

double Field::at(int a, int b) const {
  if (grid.contains(a, b)) return values[grid.index(a, b)];
  return exterior(grid.center_of(a, b));
}

Field make_field(const Grid& grid, Profile profile, const Exterior& exterior) {
  if (!profile) throw InputError("make_field needs a profile");
  Field u;
  u.grid = grid;
  u.exterior = exterior;
  u.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = profile(grid.center(i));
    if (std::isnan(v)) throw InputError("profile returned NaN at cell " + std::to_string(i));
    if (v > 1.0 || v < -1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++u.clamp_count;
    }
    u.values[i] = v;
  }
  u.profile = std::move(profile);
  return u;
}

Field refine(const Field& u, int factor) {
  if (factor < 1) throw ConfigError("refinement factor must be >= 1");
  Grid g = u.grid;
  g.h = u.grid.h / factor;
  g.cells = (u.grid.cells - 1) * factor + 1;
  if (u.profile) return make_field(g, u.profile, u.exterior);

  Field out;
  out.grid = g;
  out.exterior = u.exterior;
  out.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    auto split = [&](int k) {
      const int base = (k >= 0 ? k : k - (factor - 1)) / factor;
      return std::pair<int, double>{base, static_cast<double>(k - base * factor) / factor};
    };
    const auto [a0, ta] = split(c[0]);
    if (g.n == 1) {
      out.values[i] = (1.0 - ta) * u.at(a0, 0) + (ta > 0.0 ? ta * u.at(a0 + 1, 0) : 0.0);
    } else {
      const auto [b0, tb] = split(c[1]);
      double v = (1.0 - ta) * (1.0 - tb) * u.at(a0, b0);
      if (ta > 0.0) v += ta * (1.0 - tb) * u.at(a0 + 1, b0);
      if (tb > 0.0) v += (1.0 - ta) * tb * u.at(a0, b0 + 1);
      if (ta > 0.0 && tb > 0.0) v += ta * tb * u.at(a0 + 1, b0 + 1);
      out.values[i] = v;
    }
  }
  return out;
}

double level_set_volume(const Field& u, double threshold, double radius) {
  require_radius(u.grid, radius);
  std::size_t count = 0;
  for (std::size_t i = 0; i < u.grid.size(); ++i)
    if (u.values[i] > threshold && in_ball(u.grid, i, radius)) ++count;
  return static_cast<double>(count) * u.grid.cell_volume();
}

double interface_integral(const Field& u, double theta_lo, double theta_hi, double radius, double m) {
  if (!(-1.0 < theta_lo && theta_lo < theta_hi && theta_hi < 1.0))
    throw DomainError("interface band needs -1 < theta_lo < theta_hi < 1");
  require_radius(u.grid, radius);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    const double v = u.values[i];
    if (v > theta_lo && v <= theta_hi && in_ball(u.grid, i, radius)) sum += std::pow(std::fabs(1.0 + v), m);
  }
  return sum * u.grid.cell_volume();
}

Field symmetric_decreasing_rearrangement(const Field& u) {
  if (!u.exterior.is_constant())
    throw DomainError("rearrangement needs a constant exterior (compact support of u - inf u)");
  const double base = u.exterior.parameter();
  const Grid& g = u.grid;
  const int k = g.half();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (u.values[i] < base) throw DomainError("rearrangement needs the exterior value to be the infimum of u");
    const auto c = g.coords(i);
    const bool edge = std::abs(c[0]) == k || (g.n == 2 && std::abs(c[1]) == k);
    if (edge && u.values[i] != base) throw DomainError("support of u - inf u touches the box boundary");
  }

  std::vector<double> sorted = u.values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.radius2_units(a) < g.radius2_units(b); });

  Field out;
  out.grid = g;
  out.exterior = u.exterior;
  out.values.resize(g.size());
  for (std::size_t r = 0; r < order.size(); ++r) out.values[order[r]] = sorted[r];
  return out;
}

void write_field(std::ostream& out, const Field& u) {
  out << u.grid.n << ' ' << format_double(u.grid.h) << ' ' << format_double(u.grid.box_radius()) << ' '
      << u.exterior.token() << '\n';
  for (std::size_t i = 0; i < u.values.size(); ++i) out << i << ' ' << format_double(u.values[i]) << '\n';
}

Field read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("field text is empty");
  std::istringstream header(line);
  std::string n_text, h_text, b_text, ext_text;
  if (!(header >> n_text >> h_text >> b_text >> ext_text)) throw InputError("malformed field header: " + line);
  const int n = static_cast<int>(parse_integer(n_text));
  const double h = parse_double(h_text);
  const double b = parse_double(b_text);
  Field u;
  u.grid = Grid::centered(n, h, b);
  u.exterior = Exterior::parse(ext_text);
  u.values.assign(u.grid.size(), 0.0);
  std::vector<bool> seen(u.grid.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string i_text, v_text;
    if (!(row >> i_text >> v_text)) throw InputError("malformed field line " + std::to_string(line_no));
    const auto idx = parse_integer(i_text);
    if (idx < 0 || static_cast<std::size_t>(idx) >= u.values.size())
      throw InputError("cell index out of range on line " + std::to_string(line_no));
    const double v = parse_double(v_text);
    if (!(std::fabs(v) <= 1.0)) throw InputError("field value outside [-1, 1] on line " + std::to_string(line_no));
    u.values[static_cast<std::size_t>(idx)] = v;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InputError("field text is missing cells");
  return u;
}

}  // namespace nlphase
