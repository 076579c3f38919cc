#pragma once

#include "opsplit/engine.hpp"
#include "opsplit/operators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

// Equilibrium problems with convex constraints: find x in S = cap_i S_i with
// F(x, y) + <Bx, y - x> >= 0 for all y in C, solved by forward steps on B,
// delta-approximate bifunction resolvents, and weighted averages of
// projections onto the S_i under quasi-cyclic index control:
//
//   y_n = x_n - gamma_n (B x_n + e_{1,n})
//   q_n in J^{delta_n}_{gamma_n F} y_n
//   r_n = q_n - gamma_n (B q_n + e_{2,n})
//   z_n = x_n - y_n + r_n
//   x_{n+1} = sum_{i in I_n} omega_{i,n} P_{S_i} z_n.

namespace opsplit {

/// Equilibrium bifunction on C^2 with an exact resolvent oracle for
/// J_{gamma F} x = the unique z in C with
/// gamma F(z, y) + <z - x, y - z> >= 0 for all y in C.
struct Bifunction {
  ConvexSet c = WholeSpace{0};
  std::function<double(const Vector&, const Vector&)> eval;
  std::function<Vector(double gamma, const Vector&)> exact_resolvent;
  std::string structure = "custom";
};

/// F(x, y) = g(y) - g(x) for g(y) = (alpha/2)||y - anchor||^2 + <linear, y>,
/// alpha >= 0. The resolvent is the projection onto C of
/// (x + gamma*alpha*anchor - gamma*linear) / (1 + gamma*alpha).
Bifunction make_dc_quadratic_bifunction(double alpha, Vector anchor,
                                        Vector linear, ConvexSet c);

/// F(x, y) = <Mx, y - x> with M monotone linear and C a box (d <= 4).
/// The resolvent solves 0 in (I + gamma M) z - x + N_C(z) exactly by
/// active-set enumeration.
Bifunction make_vi_linear_bifunction(Matrix m, Box c);

/// Step-wise resolvent accuracies delta_n >= 0 with sum sqrt(delta_n) < inf
/// for the built-in schedules; delta_n = 0 means the exact resolvent.
struct DeltaSchedule {
  std::function<double(int)> delta;
};

DeltaSchedule zero_delta();
/// delta_n = scale / (n+1)^exponent, exponent > 2 so sqrt stays summable.
DeltaSchedule power_delta(double scale, double exponent);

/// Quasi-cyclic activation: every index i in {1..num_indices} must appear in
/// any window of window[i-1] consecutive I_n, with 1 <= |I_n| <= max_active.
struct IndexControl {
  int num_indices = 1;
  std::function<std::vector<int>(int)> active;  // 1-based indices
  std::vector<int> window;                      // M_i per index
  int max_active = 1;                           // N
};

/// Singletons {1}, {2}, ..., {m}, {1}, ... with M_i = m, N = 1.
IndexControl cyclic_control(int m);
/// Pattern repeated cyclically; windows and N supplied by the caller.
IndexControl explicit_control(std::vector<std::vector<int>> pattern,
                              std::vector<int> window, int max_active);
/// Seeded random subsets of cardinality <= max_active that always include
/// the cyclically due index, so M_i = m holds by construction.
IndexControl random_audited_control(int m, int max_active,
                                    std::uint64_t seed);

struct WeightScheme {
  std::function<double(int i, int n)> omega;  // i is 1-based
};

/// omega_{i,n} = 1 / |I_n|.
WeightScheme uniform_weights(const IndexControl& ctrl);

struct IndexControlReport {
  bool pass = true;
  int first_violation_n = -1;
  int violating_index = -1;
  std::string reason;
};

/// Exhaustively checks the quasi-cyclic conditions for all n <= horizon and
/// all indices; reports the first violation. Requires horizon >= max M_i.
IndexControlReport validate_index_control(const IndexControl& ctrl,
                                          int horizon);

/// argmin over C of gamma*g(y) + (1/2)||y - x||^2 for the quadratic family
/// behind make_dc_quadratic_bifunction.
Vector exact_resolvent_dc(double alpha, const Vector& anchor,
                          const Vector& linear, const ConvexSet& c,
                          double gamma, const Vector& x);

/// A member of the delta-resolvent: the exact resolvent moved by the given
/// perturbation (||perturbation|| <= sqrt(delta)) and projected back onto C,
/// so ||result - J_{gamma F} x|| <= sqrt(delta) by construction.
Vector delta_resolvent(const Bifunction& f, double gamma, double delta,
                       const Vector& x, const Vector& perturbation);

/// sum_i weights[i] * P_{sets[i]}(z). Throws on count mismatch or weights
/// that do not sum to 1 within 1e-12.
Vector averaged_projection(const std::vector<ConvexSet>& sets,
                           const std::vector<double>& weights,
                           const Vector& z);

struct EquilibriumProblem {
  Eigen::Index dim = 0;
  Bifunction f;
  MonotoneMap b;
  std::vector<ConvexSet> sets;  // S_i, projectable
  double epsilon = 0.1;         // in (0, 1/(chi+1))
};

struct EquilibriumErrors {
  std::function<Vector(int)> e1;
  std::function<Vector(int)> e2;
};

EquilibriumErrors zero_equilibrium_errors(Eigen::Index dim);
EquilibriumErrors summable_equilibrium_errors(Eigen::Index dim, double coeff,
                                              double power,
                                              std::uint64_t seed);

/// How the delta-resolvent member q_n is chosen when delta_n > 0.
struct PerturbationRule {
  /// 0 disables perturbations; otherwise the perturbation at step n is
  /// 0.9*sqrt(delta_n) along a unit direction seeded by (seed, n).
  std::uint64_t seed = 0;
  bool enabled = false;
};

struct EquilibriumSchedules {
  GammaSchedule gamma;
  DeltaSchedule delta;
  IndexControl control;
  WeightScheme weights;
  EquilibriumErrors errors;
  PerturbationRule perturbation;
};

struct EquilibriumStepResult {
  StepRecord record;
};

/// One iteration of the averaged-projection equilibrium method. Throws when
/// q_n leaves dom B.
EquilibriumStepResult equilibrium_step(const EquilibriumProblem& p,
                                       const EquilibriumSchedules& s, int n,
                                       const Vector& x_n);

struct EquilibriumResult {
  IterateTrace trace;
  RunStatus status = RunStatus::max_iter;
  Vector solution;
  int iterations = 0;
  double final_residual = 0.0;     // ||J_{gamma F}(x - gamma Bx) - x||
  double final_feasibility = 0.0;  // max_i dist(x, S_i)
};

struct EquilibriumOptions {
  std::optional<Vector> reference;
};

/// Default termination for the equilibrium front end, matching the
/// inclusion solver's 1e-8 tolerances.
inline StopRule equilibrium_stop_defaults() {
  return StopRule{100000, 1e-8, 1e-8};
}

/// Runs equilibrium_step to termination; converged when the equilibrium
/// residual is <= stop.tol and max_i dist(x, S_i) <= stop.feas_tol.
EquilibriumResult solve_equilibrium(
    const EquilibriumProblem& p, const EquilibriumSchedules& s,
    const Vector& x0, const StopRule& stop = equilibrium_stop_defaults(),
    const EquilibriumOptions& options = {});

/// Certificates for Assumption-style bifunction properties on sampled
/// points, pairs, and midpoint triples in C: F(x,x) = 0, skew inequality
/// F(x,y) + F(y,x) <= 0, and convexity of F(x, .).
VerificationReport verify_bifunction(const Bifunction& f, int samples,
                                     std::uint64_t seed);

/// Natural residual of the equilibrium problem at x.
double equilibrium_residual(const EquilibriumProblem& p, double gamma,
                            const Vector& x);

}  // namespace opsplit
