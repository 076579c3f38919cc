#pragma once

#include "opsplit/engine.hpp"
#include "opsplit/operators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

// Constrained forward-backward-forward splitting for 0 in Ax + Bx over
// S = {f_1 <= 0} cap ... cap {f_m <= 0}: at step n,
//
//   y_n = x_n - gamma_n (B x_n + e_{1,n})
//   q_n = J_{gamma_n A}(y_n + e_{2,n})
//   r_n = q_n - gamma_n (B q_n + e_{3,n})
//   z_n = x_n - y_n + r_n
//   x_{n+1} = G_{i(n)} z_n        (cyclic subgradient projections)
//
// with B monotone chi-Lipschitz, gamma_n in [epsilon, (1-epsilon)/chi], and
// summable error sequences. The iteration is an instance of the generic
// engine via T_n = J_{gamma_n A}, R_n = Id - gamma_n B, lambda_n = 1.

namespace opsplit {

/// Convex constraint f <= 0 with a subgradient selection.
struct Constraint {
  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> subgrad;
  std::string tag = "custom";
};

/// f(x) = <normal, x> - offset.
Constraint affine_constraint(Vector normal, double offset);

/// f(x) = ||x - center|| - radius; subgradient is the radial direction,
/// zero at the center.
Constraint ball_distance_constraint(Vector center, double radius);

/// f == -1: always satisfied, never cuts.
Constraint trivial_constraint(Eigen::Index dim);

struct InclusionProblem {
  Eigen::Index dim = 0;
  ResolventOracle a;
  MonotoneMap b;
  std::vector<Constraint> constraints;  // m >= 1
  double epsilon = 0.1;                 // in (0, 1/(chi+1))
};

struct InclusionErrors {
  std::function<Vector(int)> e1;
  std::function<Vector(int)> e2;
  std::function<Vector(int)> e3;
};

InclusionErrors zero_inclusion_errors(Eigen::Index dim);
InclusionErrors summable_inclusion_errors(Eigen::Index dim, double coeff,
                                          double power, std::uint64_t seed);

struct SubgradientProjection {
  Vector point;
  /// Half-space {y : <u, y> <= <u, x> - f(x)} containing the 0-level set;
  /// absent when f(x) <= 0 with a zero subgradient (no informative cut).
  std::optional<HalfSpace> halfspace;
};

/// Subgradient projector: identity where f(x) <= 0, otherwise
/// x - (f(x)/||u||^2) u with u the constraint's subgradient selection.
/// Throws when f(x) > 0 and u = 0 (certifies an infeasible constraint).
SubgradientProjection subgradient_project(const Constraint& c,
                                          const Vector& x);

/// 1-based cyclic constraint index under 0-based iteration counting:
/// 1 + (n mod m), cycling 1, 2, ..., m, 1, ...
int cyclic_index(int m, int n);

struct TsengStepResult {
  StepRecord record;
};

/// One forward-backward-forward step. Throws when q_n leaves dom B
/// (violates dom A subset dom B; the problem is malformed).
TsengStepResult tseng_step(const InclusionProblem& p, const GammaSchedule& g,
                           const InclusionErrors& errs, int n,
                           const Vector& x_n);

struct InclusionResult {
  IterateTrace trace;
  RunStatus status = RunStatus::max_iter;
  Vector solution;
  int iterations = 0;
  double final_residual = 0.0;     // ||J_{gamma A}(x - gamma Bx) - x||
  double final_feasibility = 0.0;  // max_i max(0, f_i(x))
};

struct InclusionOptions {
  std::optional<Vector> reference;
};

/// Default termination for the inclusion front end: residual and
/// feasibility tolerances at 1e-8 (well-conditioned desk problems in double
/// precision).
inline StopRule inclusion_stop_defaults() {
  return StopRule{100000, 1e-8, 1e-8};
}

/// Runs tseng_step to termination; converged when the inclusion residual is
/// <= stop.tol and every constraint satisfies f_i(x) <= stop.feas_tol.
InclusionResult solve_inclusion(const InclusionProblem& p,
                                const GammaSchedule& g,
                                const InclusionErrors& errs, const Vector& x0,
                                const StopRule& stop = inclusion_stop_defaults(),
                                const InclusionOptions& options = {});

/// The reduction onto the generic engine: T_n = J_{gamma_n A} with the
/// resolvent perturbation folded into the argument, R_n = Id - gamma_n B,
/// a_n = -gamma_n e_{1,n}, c_n = -gamma_n e_{3,n}, lambda_n = 1, and Q_n the
/// subgradient projector of the cyclically active constraint.
std::tuple<ProblemSpec, ErrorSchedule, RelaxationSchedule> as_engine_spec(
    const InclusionProblem& p, const GammaSchedule& g,
    const InclusionErrors& errs);

/// max_i max(0, f_i(x)).
double constraint_violation(const std::vector<Constraint>& constraints,
                            const Vector& x);

/// Subgradient validity certificates: f(y) >= f(x) + <subgrad(x), y - x> on
/// sampled pairs, one check per constraint.
VerificationReport verify_constraints(const std::vector<Constraint>& cs,
                                      Eigen::Index dim, int samples,
                                      std::uint64_t seed);

/// Natural residual of the inclusion at x for step size gamma.
double inclusion_residual(const InclusionProblem& p, double gamma,
                          const Vector& x);

}  // namespace opsplit
