#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlphase/energy.hpp"
#include "nlphase/fields.hpp"
#include "nlphase/potentials.hpp"

namespace nlphase {

struct MinimizeConfig {
  int max_iters = 2000;
  double grad_tol = 1e-7;   // on max |P(u - g/h^n) - u|
  double step_init = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-14;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: keep the energy parameters' setting

  void validate() const;
};

enum class MinimizeStatus { Converged, MaxIters, Stagnated };
const char* status_name(MinimizeStatus s);

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct MinimizeResult {
  Field field;
  MinimizeStatus status = MinimizeStatus::MaxIters;
  int iterations = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  std::vector<TraceRow> trace;
};

// Discrete E(·, B_omega) for fields sharing the data outside Ω, evaluated
// without the divergence check.
class DiscreteEnergy {
 public:
  DiscreteEnergy(const Field& u, double omega_radius, const EnergyParams& params, const PotentialSpec& spec);

  double value(std::span<const double> values) const;
  void gradient(std::span<const double> values, std::span<double> grad) const;
  const std::vector<std::size_t>& omega_cells() const { return op_.omega_cells(); }
  const Grid& grid() const { return op_.grid(); }

 private:
  KineticOperator op_;
  PotentialSpec spec_;
  double one_minus_s_;
};

// Per-cell partial derivatives of the discrete total energy; zero off Ω.
std::vector<double> energy_gradient(const Field& u, double omega_radius, const EnergyParams& params,
                                    const PotentialSpec& spec);

// Projected gradient descent on [-1, 1]^Ω with a Barzilai-Borwein trial step
// and Armijo backtracking. Cells outside Ω are never touched.
MinimizeResult minimize(const Field& u0, double omega_radius, const EnergyParams& params,
                        const PotentialSpec& spec, const MinimizeConfig& cfg = {});

struct Candidate {
  std::string name;
  Field field;
};

struct SuiteOptions {
  int perturbations = 4;
  double noise = 0.25;
  int translate_cells = 2;
  int refine_iters = 50;
  std::uint64_t seed = 1;
};

// u, constants -1/0/+1 on Ω, translates of u by up to translate_cells along
// each axis, a short projected-gradient refinement of u, and seeded random
// perturbations. Every candidate agrees with u outside Ω.
std::vector<Candidate> build_candidate_suite(const Field& u, double omega_radius, const EnergyParams& params,
                                             const PotentialSpec& spec, const SuiteOptions& opts = {});

struct CertificateEntry {
  double radius = 0.0;
  std::string candidate;
  double energy_u = 0.0;
  double energy_v = 0.0;
  double violation = 0.0;
};

struct MinimalityCertificate {
  enum class Kind { Epsilon, Q };
  Kind kind = Kind::Epsilon;
  double parameter = 0.0;  // ε or Q
  double E0 = 0.0;         // E(u, Ω)
  double implied_epsilon = 0.0;  // (Q - 1) E0 for Q certificates
  int candidates_tested = 0;
  double worst_violation = 0.0;
  std::string worst_candidate;
  double worst_radius = 0.0;
  bool passed = false;
  std::vector<CertificateEntry> entries;
};

// Pass iff E(u, Ω) <= ε + E(v, Ω) for every candidate.
MinimalityCertificate certify_epsilon(const Field& u, double omega_radius, const EnergyParams& params,
                                      const PotentialSpec& spec, double epsilon,
                                      const std::vector<Candidate>& candidates);

struct SubdomainSuite {
  double radius = 0.0;
  std::vector<Candidate> candidates;
};

// Pass iff E(u, A) <= Q E(v, A) for every ball A and candidate v on A.
MinimalityCertificate certify_Q(const Field& u, double omega_radius, const EnergyParams& params,
                                const PotentialSpec& spec, double Q, const std::vector<SubdomainSuite>& suites);

// --- Worked examples ------------------------------------------------------------

// u(x/eps) with u = 1 on B_{e^-2}, |ln|x|| - 1 on B_1 \ B_{e^-2}, -1 outside B_1.
Field bump_field(double eps, double h, int n, double box_radius = 1.0);

// 1 on the closed ball B_eta, -1 elsewhere.
Field indicator_field(double eta, double h, int n, double box_radius);

struct BumpStudy {
  double eps = 0.0;
  double C = 0.0;                  // K(u, B_1), measured on the grid h / eps
  double eps_tilde = 0.0;          // eps^(n-sp) (C (1-s) + eps^sp Λ 2^m |B_1|)
  double energy = 0.0;             // E(u_eps, B_1)
  double kinetic = 0.0;            // K(u_eps, B_1)
  double potential = 0.0;
  double potential_bound = 0.0;    // eps^n Λ 2^m |B_1|
  double scaled_kinetic = 0.0;     // eps^(n-sp) K(u, B_{1/eps})
  double energy_on_B_eps = 0.0;    // E(u_eps, B_eps)
  double energy_plus_one = 0.0;    // E(v, B_eps) for v = 1 on B_eps
  double energy_minus_one = 0.0;   // E(v, B_eps) for v = -1 on B_eps
  MinimalityCertificate epsilon_cert;      // on B_1 with eps_tilde
  MinimalityCertificate epsilon_cert_sub;  // on B_{1/2} with eps_tilde
  MinimalityCertificate q_cert;            // on B_eps and B_1
};

BumpStudy bump_study(double eps, double h, const EnergyParams& params, const PotentialSpec& spec, double Q,
                     const SuiteOptions& suite = {});

}  // namespace nlphase
