#pragma once

#include "opsplit/operators.hpp"
#include "opsplit/vector_space.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

// Generic relaxed outer-approximation iteration for constrained fixed-point
// problems: at step n,
//
//   y_n = R_n x_n + a_n
//   q_n = T_n y_n + b_n          (stop if q_n leaves dom R_n)
//   r_n = R_n q_n + c_n
//   z_n = x_n - y_n + r_n
//   x_{n+1} = x_n + lambda_n (Q_n z_n - x_n)
//
// with T_n firmly nonexpansive, R_n a pseudo contraction whose complement is
// beta_n-Lipschitz (beta_n <= 1 - epsilon), Q_n the projector onto a
// half-space containing the constraint set, and summable error sequences
// a_n, b_n, c_n. Domain exit is a legitimate terminal status, not an error.

namespace opsplit {

/// Outer-approximation step for one iterate: Q_n applied at z.
using OuterStep = std::function<Vector(const Vector&)>;

struct ProblemSpec {
  Eigen::Index dim = 0;
  double epsilon = 0.1;  // in (0,1); beta_n <= 1 - epsilon enforced
  std::function<FirmOpHandle(int)> t_schedule;
  std::function<PseudoContractionHandle(int)> r_schedule;
  std::function<OuterStep(int)> q_schedule;
  ConvexSet constraint_s = WholeSpace{0};  // post-hoc feasibility reporting
};

/// Absolute perturbations injected into the three operator evaluations.
/// Schedules must be pure in n; built-in factories are summable by
/// construction.
struct ErrorSchedule {
  std::function<Vector(int)> a;
  std::function<Vector(int)> b;
  std::function<Vector(int)> c;
};

ErrorSchedule zero_errors(Eigen::Index dim);

/// ||e_n|| = coeff / (n+1)^power along seeded random unit directions;
/// power > 1 keeps the norms summable. Streams for a, b, c are independent.
ErrorSchedule summable_errors(Eigen::Index dim, double coeff, double power,
                              std::uint64_t seed);

/// Validates that the partial sums of ||e_n|| behave like a convergent
/// series over dyadic blocks up to the horizon: each block sum
/// S(2^{k+1}) - S(2^k) must not exceed its predecessor. Catches schedules
/// whose declared summability is wrong (e.g. power <= 1) at desk scale.
bool check_summable(const std::function<Vector(int)>& e, int horizon);

struct RelaxationSchedule {
  std::function<double(int)> lambda;
};

RelaxationSchedule constant_relaxation(double value);

/// Step sizes for the forward evaluations of B; the solvers check every
/// query against [epsilon, (1-epsilon)/chi].
struct GammaSchedule {
  std::function<double(int)> gamma;
};

GammaSchedule constant_gamma(double value);

struct StopRule {
  int max_iter = 100000;
  double tol = 1e-9;        // on max(residual, outer gap)
  double feas_tol = 1e-8;   // used by the solver front ends
};

struct StepRecord {
  int n = 0;
  Vector x;       // iterate entering the step
  Vector y, q, r, z;
  Vector x_next;
  double residual = 0.0;     // ||q_n - x_n||
  double outer_gap = 0.0;    // ||z_n - Q_n z_n||
  double error_bound = 0.0;  // 3||a_n|| + 2||b_n|| + ||c_n||
  double dist_to_ref = std::numeric_limits<double>::quiet_NaN();
  double shadow_error = std::numeric_limits<double>::quiet_NaN();
  double feasibility = std::numeric_limits<double>::quiet_NaN();
};

struct IterateTrace {
  std::vector<StepRecord> records;

  /// One row per iteration, columns (n, residual, outer_gap, error_bound,
  /// dist_to_ref), comma separated with a header row.
  void write_csv(std::ostream& out) const;
};

enum class RunStatus { converged, max_iter, domain_stop };

const char* to_string(RunStatus status);

struct StepResult {
  std::optional<StepRecord> record;  // empty iff stopped
  std::string stop_reason;           // set iff stopped
  bool stopped() const { return !record.has_value(); }
};

struct EngineOptions {
  /// Optional reference solution; fills dist_to_ref in the trace.
  std::optional<Vector> reference;
  /// Opt-in shadow sequence (error-free re-evaluation of R_n, T_n, R_n) that
  /// measures ||e_n|| exactly; doubles the operator evaluations.
  bool shadow = false;
};

struct RunResult {
  IterateTrace trace;
  RunStatus status = RunStatus::max_iter;
  Vector final_x;
  std::string stop_reason;
  int iterations = 0;
};

/// One iteration. Throws std::invalid_argument when x_n violates the
/// precondition x_n in dom R_n (caller bug, distinct from the algorithmic
/// domain stop encoded in the result).
StepResult engine_step(const ProblemSpec& spec, const ErrorSchedule& errs,
                       const RelaxationSchedule& relax, int n,
                       const Vector& x_n,
                       const EngineOptions& options = {});

/// Iterates engine_step until the stop rule fires: converged when
/// max(residual, outer gap) <= tol, otherwise max_iter or domain_stop.
RunResult engine_run(const ProblemSpec& spec, const ErrorSchedule& errs,
                     const RelaxationSchedule& relax, const Vector& x0,
                     const StopRule& stop, const EngineOptions& options = {});

struct FejerReport {
  bool pass = true;
  std::vector<int> violations;
  double worst_excess = 0.0;  // max over n of lhs - rhs (positive = violation)
  double xi = 0.0;       // sup_n ||x_n - z_ref|| over the recorded orbit
  double eta_sum = 0.0;  // sum of ||e_n||^2 + 2 xi ||e_n|| with the bound
                         // standing in for ||e_n||
};

/// Verifies ||x_{n+1} - z_ref|| <= ||x_n - z_ref|| + error_bound_n + 1e-10
/// for every recorded step.
FejerReport fejer_audit(const IterateTrace& trace, const Vector& z_ref);

/// Half-space outer step factories.
OuterStep fixed_halfspace_outer(HalfSpace h);
OuterStep identity_outer();

}  // namespace opsplit
