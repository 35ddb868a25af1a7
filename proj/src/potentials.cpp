#include "nlphase/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlphase/errors.hpp"

namespace nlphase {

namespace {

constexpr double kFdStep = 1e-3;
constexpr int kCalibrationSamples = 4096;
constexpr int kDyadicBits = 20;

double normalization_factor(const PotentialSpec& spec) {
  return spec.normalization == Normalization::Scaled ? 1.0 / (2.0 * spec.m) : 1.0;
}

// Fornberg's recursion for finite-difference weights of derivative `order`
// at 0 on the given nodes.
std::vector<long double> fornberg_weights(int order, const std::vector<long double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<long double>> c(n, std::vector<long double>(order + 1, 0.0L));
  long double c1 = 1.0L;
  long double c4 = nodes[0];
  c[0][0] = 1.0L;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const long double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<long double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

long double plain_w(long double m, long double x) {
  const long double base = 1.0L - x * x;
  if (base <= 0.0L) return 0.0L;
  return std::pow(base, m);
}

bool calibration_predicate(double m, double c, double q, const std::vector<Polynomial<double>>& ps) {
  const bool fractional = !is_integer_exponent(m);
  for (int i = 0; i <= kCalibrationSamples; ++i) {
    const double x = -1.0 + q * static_cast<double>(i) / kCalibrationSamples;
    for (const auto& p : ps)
      if (p(x) < c) return false;
    if (fractional && i > 0 && fractional_order_derivative(m, x) < c) return false;
  }
  return true;
}

}  // namespace

bool is_integer_exponent(double m) { return std::floor(m) == m; }

int well_order(double m) {
  return is_integer_exponent(m) ? static_cast<int>(m) : static_cast<int>(std::floor(m)) + 1;
}

PotentialSpec prototype_potential(double m, Normalization normalization, double c) {
  if (!(m > 1.0)) throw DomainError("prototype potential needs m > 1");
  PotentialSpec spec;
  spec.m = m;
  spec.normalization = normalization;
  const double scale = normalization == Normalization::Scaled ? 1.0 / (2.0 * m) : 1.0;
  // (1-x)^m >= 2^-m for x <= 1/2 and (1-x)^m <= 2^m on [-1, 1].
  spec.theta = 0.5;
  spec.lambda = std::min(1.0, scale * std::pow(2.0, -m));
  spec.Lambda = std::max(1.0, scale * std::pow(2.0, m));
  const WellCalibration cal = calibrate_c1_q(m, c);
  spec.q = cal.q;
  spec.k = cal.k;
  spec.c1 = cal.c1 * scale;
  return spec;
}

PotentialSpec zero_potential(double m) {
  PotentialSpec spec;
  spec.m = m;
  spec.custom = [](double) { return 0.0; };
  spec.custom_derivative = [](double) { return 0.0; };
  return spec;
}

double eval_potential(const PotentialSpec& spec, double x) {
  if (!(std::fabs(x) <= 1.0)) throw DomainError("potential evaluated outside [-1, 1]");
  if (spec.custom) return spec.custom(x);
  const double base = (1.0 - x) * (1.0 + x);
  if (base <= 0.0) return 0.0;
  return std::pow(base, spec.m) * normalization_factor(spec);
}

double eval_potential_derivative(const PotentialSpec& spec, double x) {
  if (!(std::fabs(x) <= 1.0)) throw DomainError("potential evaluated outside [-1, 1]");
  if (spec.custom_derivative) return spec.custom_derivative(x);
  if (spec.custom) {
    const double h = 1e-6;
    const double a = std::max(-1.0, x - h);
    const double b = std::min(1.0, x + h);
    return (spec.custom(b) - spec.custom(a)) / (b - a);
  }
  const double base = (1.0 - x) * (1.0 + x);
  if (base <= 0.0) return 0.0;
  return -2.0 * spec.m * x * std::pow(base, spec.m - 1.0) * normalization_factor(spec);
}

double lower_bound_constant(const PotentialSpec& spec, double mu) {
  if (!(mu > -1.0 && mu < 1.0)) throw DomainError("lower_bound_constant needs mu in (-1, 1)");
  if (!spec.custom) return std::pow(1.0 - mu, spec.m) * normalization_factor(spec);
  double best = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 20000;
  for (int i = 1; i <= kSamples; ++i) {
    const double x = -1.0 + (mu + 1.0) * static_cast<double>(i) / kSamples;
    best = std::min(best, spec.custom(x) / std::pow(1.0 + x, spec.m));
  }
  return best;
}

Polynomial<double> recursive_polynomial(double m, int k) { return recursive_polynomial<double>(m, k); }

Polynomial<Rational> recursive_polynomial_exact(const Rational& m, int k) {
  return recursive_polynomial<Rational>(m, k);
}

double eval_P(double m, int k, double x) {
  if (!(m > 1.0)) throw DomainError("eval_P needs m > 1");
  if (k < 1 || k > static_cast<int>(std::floor(m))) throw DomainError("eval_P: k must lie in 1..floor(m)");
  if (!(std::fabs(x) <= 1.0)) throw DomainError("eval_P: |x| must be <= 1");
  return recursive_polynomial(m, k)(x);
}

double fractional_order_derivative(double m, double x) {
  const int base_order = static_cast<int>(std::floor(m));
  const double a = m - base_order;
  const auto p = recursive_polynomial(m, base_order);
  const double w = (1.0 - x) * (1.0 + x);
  return -2.0 * x * a * std::pow(w, a - 1.0) * p(x) + std::pow(w, a) * p.derivative()(x);
}

IdentityCheck check_derivative_identity(double m, int k, std::span<const double> xs) {
  if (k < 1 || k > static_cast<int>(std::floor(m))) throw DomainError("identity check: k must lie in 1..floor(m)");
  const int half_width = (k + 1) / 2 + 1;
  std::vector<long double> nodes;
  for (int j = -half_width; j <= half_width; ++j) nodes.push_back(static_cast<long double>(j));
  const auto weights = fornberg_weights(k, nodes);
  // Round-off grows like h^-k, so higher orders get a wider step.
  const long double h = kFdStep * std::ldexp(1.0L, std::max(0, k - 2));
  const long double scale = std::pow(h, static_cast<long double>(-k));
  const auto p = recursive_polynomial(m, k);

  IdentityCheck out;
  out.step = static_cast<double>(h);
  for (double x : xs) {
    if (std::fabs(x) > 1.0 - 10.0 * static_cast<double>(h)) continue;
    long double fd = 0.0L;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      fd += weights[j] * plain_w(m, static_cast<long double>(x) + nodes[j] * h);
    fd *= scale;
    const long double exact = plain_w(m - k, x) * static_cast<long double>(p(x));
    const double r = static_cast<double>(std::fabs(fd - exact));
    ++out.points_used;
    if (r >= out.max_residual) {
      out.max_residual = r;
      out.worst_x = x;
    }
  }
  return out;
}

WellCheck check_well_condition(const PotentialSpec& spec, int samples) {
  if (!(spec.q > 0.0 && spec.q < 1.0)) throw ConfigError("well condition needs q in (0, 1)");
  if (samples < 2) throw ConfigError("well condition needs at least 2 samples");
  // Round-off floor for W(t) - W(r) when both sides vanish.
  constexpr double kTolerance = 1e-13;
  WellCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> grid(samples);
  for (int i = 0; i < samples; ++i) grid[i] = -1.0 + spec.q * static_cast<double>(i) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double r = grid[i];
    const double wr = eval_potential(spec, r);
    for (int j = i; j < samples; ++j) {
      const double t = grid[j];
      const double d = t - r;
      const double rhs = spec.c1 * d * std::pow(std::fabs(1.0 + r), spec.m - 1.0) + spec.c1 * std::pow(d, spec.k);
      const double slack = eval_potential(spec, t) - wr - rhs;
      if (slack < out.worst_slack) {
        out.worst_slack = slack;
        out.worst_r = r;
        out.worst_t = t;
      }
    }
  }
  out.holds = out.worst_slack >= -kTolerance;
  return out;
}

WellCalibration calibrate_c1_q(double m, double c) {
  if (!(m > 1.0)) throw DomainError("calibration needs m > 1");
  if (!(c > 0.0 && c < 1.0)) throw DomainError("calibration needs c in (0, 1)");
  const int top = static_cast<int>(std::floor(m));
  std::vector<Polynomial<double>> ps;
  for (int j = 1; j <= top; ++j) ps.push_back(recursive_polynomial(m, j));

  const double floor_q = std::ldexp(1.0, -kDyadicBits);
  if (!calibration_predicate(m, c, floor_q, ps))
    throw CalibrationError("no admissible q above 2^-20 for m = " + std::to_string(m));

  double lo = floor_q;
  double hi = 1.0;
  for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (calibration_predicate(m, c, mid, ps) ? lo : hi) = mid;
  }
  // Largest dyadic with kDyadicBits digits not exceeding the bisection limit,
  // kept strictly below 1.
  const double scale = std::ldexp(1.0, kDyadicBits);
  double q = std::floor(lo * scale) / scale;
  if (q >= 1.0) q = 1.0 - 1.0 / scale;

  WellCalibration out;
  out.q = q;
  out.k = well_order(m);
  out.c1 = std::min(c * std::pow(2.0 - q, m - 1.0), c / std::tgamma(out.k + 1.0));
  return out;
}

}  // namespace nlphase
