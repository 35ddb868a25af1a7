#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nlphase/polynomial.hpp"

namespace nlphase {

using Rational = boost::multiprecision::cpp_rational;

enum class Normalization {
  Scaled,  // W_m(x) = (1 - x^2)^m / (2m)
  Plain,   // W_m(x) = (1 - x^2)^m
};

// Double-well potential W_m together with the constants of its structural
// hypotheses:
//   lambda * 1{x <= theta} |1+x|^m <= W(x) <= Lambda |1+x|^m
//   W(t) - W(r) >= c1 (t-r) |1+r|^(m-1) + c1 (t-r)^k   for -1 <= r <= t <= -1+q
// A custom evaluation hook replaces the W_m formula when set (the structural
// constants are then whatever the caller asserts).
struct PotentialSpec {
  double m = 2.0;
  double lambda = 1.0 / 16.0;
  double Lambda = 1.0;
  double theta = 0.5;
  double c1 = 0.25 / 4.0;
  double q = 0.375;
  int k = 2;
  Normalization normalization = Normalization::Scaled;

  std::function<double(double)> custom;
  std::function<double(double)> custom_derivative;
};

// k = m for integer m, floor(m) + 1 otherwise.
int well_order(double m);
bool is_integer_exponent(double m);

// Prototype W_m with the sandwich constants that hold on [-1, 1] for the
// chosen normalization and (c1, q) from calibrate_c1_q with the given c.
PotentialSpec prototype_potential(double m, Normalization normalization = Normalization::Scaled,
                                  double c = 0.5);

// Potential that vanishes identically (for isolating the kinetic term).
PotentialSpec zero_potential(double m = 2.0);

double eval_potential(const PotentialSpec& spec, double x);
double eval_potential_derivative(const PotentialSpec& spec, double x);

// Largest lambda_mu with lambda_mu 1{x <= mu} |1+x|^m <= W(x) on (-1, 1), in
// closed form for the W_m family.
double lower_bound_constant(const PotentialSpec& spec, double mu);

// --- Recursive polynomials P_m^k -------------------------------------------
//
//   P_m^1(x) = -2 m x
//   P_m^k(x) = P_{m-k+1}^1(x) P_m^{k-1}(x) + (1 - x^2) (P_m^{k-1})'(x)
//
// so that d^k/dx^k (1-x^2)^m = (1-x^2)^(m-k) P_m^k(x) for k <= floor(m).

template <class Scalar>
Polynomial<Scalar> recursive_polynomial(const Scalar& m, int k) {
  const Polynomial<Scalar> one_minus_x2{Scalar(1), Scalar(0), Scalar(-1)};
  auto first = [](const Scalar& a) { return Polynomial<Scalar>{Scalar(0), Scalar(-2) * a}; };
  Polynomial<Scalar> p = first(m);
  for (int j = 2; j <= k; ++j) p = first(m - Scalar(j) + Scalar(1)) * p + one_minus_x2 * p.derivative();
  return p;
}

Polynomial<double> recursive_polynomial(double m, int k);
Polynomial<Rational> recursive_polynomial_exact(const Rational& m, int k);

// Value of P_m^k(x); requires 1 <= k <= floor(m) and |x| <= 1.
double eval_P(double m, int k, double x);

// Value of the derivative of order floor(m)+1 of (1-x^2)^m for non-integer m,
// for x in (-1, 1).
double fractional_order_derivative(double m, double x);

struct IdentityCheck {
  double max_residual = 0.0;
  double worst_x = 0.0;
  int points_used = 0;
  double step = 0.0;
};

// Max over xs of |D^k W_m(x) - W_{m-k}(x) P_m^k(x)| with W in the plain
// normalization. D^k is a fourth-order central difference (Fornberg weights)
// in extended precision with step 1e-3 (doubled for each order above 2);
// points closer than 10 steps to +-1 are skipped.
IdentityCheck check_derivative_identity(double m, int k, std::span<const double> xs);

struct WellCheck {
  bool holds = false;
  double worst_slack = 0.0;
  double worst_r = 0.0;
  double worst_t = 0.0;
};

// Dense (r, t) sampling of the well-growth condition over the triangle
// -1 <= r <= t <= -1+q.
WellCheck check_well_condition(const PotentialSpec& spec, int samples);

struct WellCalibration {
  double c1 = 0.0;
  double q = 0.0;
  int k = 0;
};

// Largest dyadic q (20 binary digits) such that every P_m^j, j <= floor(m),
// and for non-integer m the order floor(m)+1 derivative, stay >= c on
// [-1, -1+q]; then c1 = min{c (2-q)^(m-1), c/k!}. The constants are for the
// plain normalization.
WellCalibration calibrate_c1_q(double m, double c);

}  // namespace nlphase
