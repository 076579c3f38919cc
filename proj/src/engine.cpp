#include "opsplit/engine.hpp"

#include "opsplit/random.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace opsplit {

ErrorSchedule zero_errors(Eigen::Index dim) {
  auto zero = [dim](int) { return Vector(Vector::Zero(dim)); };
  return ErrorSchedule{zero, zero, zero};
}

ErrorSchedule summable_errors(Eigen::Index dim, double coeff, double power,
                              std::uint64_t seed) {
  if (!(power > 1.0)) {
    throw std::invalid_argument(
        "summable_errors: power must exceed 1 for a summable schedule");
  }
  auto stream = [dim, coeff, power, seed](const char* tag) {
    return [dim, coeff, power, seed, tag](int n) {
      auto rng = make_rng(seed, tag, static_cast<std::uint64_t>(n));
      const double magnitude =
          coeff / std::pow(static_cast<double>(n) + 1.0, power);
      return Vector(magnitude * unit_direction(rng, dim));
    };
  };
  return ErrorSchedule{stream("err-a"), stream("err-b"), stream("err-c")};
}

bool check_summable(const std::function<Vector(int)>& e, int horizon) {
  double prev_block = std::numeric_limits<double>::infinity();
  int n = 0;
  for (int block_end = 2; block_end <= horizon; block_end *= 2) {
    double block = 0.0;
    for (; n < block_end; ++n) block += e(n).norm();
    if (block > prev_block + 1e-12) return false;
    prev_block = block;
  }
  return true;
}

RelaxationSchedule constant_relaxation(double value) {
  return RelaxationSchedule{[value](int) { return value; }};
}

GammaSchedule constant_gamma(double value) {
  return GammaSchedule{[value](int) { return value; }};
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::domain_stop: return "domain_stop";
  }
  return "unknown";
}

namespace {

double checked_lambda(const RelaxationSchedule& relax, double epsilon, int n) {
  const double lambda = relax.lambda(n);
  if (!(lambda >= epsilon && lambda <= 1.0)) {
    throw std::invalid_argument("relaxation schedule: lambda_" +
                                std::to_string(n) + " = " +
                                std::to_string(lambda) + " outside [epsilon, 1]");
  }
  return lambda;
}

}  // namespace

StepResult engine_step(const ProblemSpec& spec, const ErrorSchedule& errs,
                       const RelaxationSchedule& relax, int n,
                       const Vector& x_n, const EngineOptions& options) {
  const PseudoContractionHandle r_op = spec.r_schedule(n);
  if (r_op.beta > 1.0 - spec.epsilon + 1e-15) {
    throw std::invalid_argument("engine_step: beta_" + std::to_string(n) +
                                " exceeds 1 - epsilon");
  }
  if (!contains(r_op.domain, x_n)) {
    throw std::invalid_argument(
        "engine_step: x_n outside dom R_n (caller bug)");
  }
  const FirmOpHandle t_op = spec.t_schedule(n);
  const double lambda = checked_lambda(relax, spec.epsilon, n);

  const Vector a_n = errs.a(n);
  const Vector b_n = errs.b(n);
  const Vector c_n = errs.c(n);

  StepRecord rec;
  rec.n = n;
  rec.x = x_n;
  rec.y = r_op.apply(x_n) + a_n;
  rec.q = t_op.apply(rec.y) + b_n;
  if (!contains(r_op.domain, rec.q)) {
    return StepResult{std::nullopt, "q outside domain"};
  }
  rec.r = r_op.apply(rec.q) + c_n;
  rec.z = rec.x - rec.y + rec.r;

  const OuterStep q_outer = spec.q_schedule(n);
  const Vector projected = q_outer(rec.z);
  rec.outer_gap = (rec.z - projected).norm();
  rec.x_next = lambda == 1.0 ? projected
                             : Vector(rec.x + lambda * (projected - rec.x));

  const PseudoContractionHandle r_next = spec.r_schedule(n + 1);
  if (!contains(r_next.domain, rec.x_next)) {
    return StepResult{std::nullopt, "next iterate outside domain"};
  }

  rec.residual = (rec.q - rec.x).norm();
  rec.error_bound = 3.0 * a_n.norm() + 2.0 * b_n.norm() + c_n.norm();
  if (options.reference) {
    rec.dist_to_ref = (rec.x - *options.reference).norm();
  }
  if (options.shadow) {
    // Error-free shadow pass measuring e_n = (y~ - y) + (r - r~) exactly.
    const Vector y_shadow = r_op.apply(x_n);
    const Vector q_shadow = t_op.apply(y_shadow);
    const Vector r_shadow = r_op.apply(q_shadow);
    rec.shadow_error = ((y_shadow - rec.y) + (rec.r - r_shadow)).norm();
  }
  rec.feasibility =
      dim_of(spec.constraint_s) == rec.x_next.size()
          ? feasibility_distance(spec.constraint_s, rec.x_next)
          : std::numeric_limits<double>::quiet_NaN();

  return StepResult{std::move(rec), ""};
}

RunResult engine_run(const ProblemSpec& spec, const ErrorSchedule& errs,
                     const RelaxationSchedule& relax, const Vector& x0,
                     const StopRule& stop, const EngineOptions& options) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("engine_run: epsilon must lie in (0, 1)");
  }
  if (!spec.t_schedule || !spec.r_schedule || !spec.q_schedule ||
      !errs.a || !errs.b || !errs.c || !relax.lambda) {
    throw std::invalid_argument("engine_run: unset schedule");
  }
  require_vector(x0, spec.dim, "engine_run: x0");
  if (!contains(spec.r_schedule(0).domain, x0)) {
    throw std::invalid_argument("engine_run: x0 outside dom R_0");
  }
  (void)checked_lambda(relax, spec.epsilon, 0);

  RunResult result;
  result.final_x = x0;
  Vector x = x0;
  for (int n = 0; n < stop.max_iter; ++n) {
    StepResult step = engine_step(spec, errs, relax, n, x, options);
    if (step.stopped()) {
      result.status = RunStatus::domain_stop;
      result.stop_reason = step.stop_reason;
      result.iterations = n;
      result.final_x = x;
      return result;
    }
    x = step.record->x_next;
    const double residual = step.record->residual;
    const double gap = step.record->outer_gap;
    result.trace.records.push_back(std::move(*step.record));
    result.iterations = n + 1;
    if (std::max(residual, gap) <= stop.tol) {
      result.status = RunStatus::converged;
      result.final_x = x;
      return result;
    }
  }
  result.status = RunStatus::max_iter;
  result.final_x = x;
  return result;
}

void IterateTrace::write_csv(std::ostream& out) const {
  out << "n,residual,outer_gap,error_bound,dist_to_ref\n";
  char buf[256];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", rec.n,
                  rec.residual, rec.outer_gap, rec.error_bound,
                  rec.dist_to_ref);
    out << buf;
  }
}

FejerReport fejer_audit(const IterateTrace& trace, const Vector& z_ref) {
  FejerReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    const double before = (rec.x - z_ref).norm();
    const double after = (rec.x_next - z_ref).norm();
    const double excess = after - (before + rec.error_bound + 1e-10);
    if (excess > 0.0) {
      report.pass = false;
      report.violations.push_back(rec.n);
    }
    report.worst_excess = std::max(report.worst_excess, excess);
    report.xi = std::max(report.xi, std::max(before, after));
  }
  for (const auto& rec : trace.records) {
    report.eta_sum += rec.error_bound * rec.error_bound +
                      2.0 * report.xi * rec.error_bound;
  }
  return report;
}

OuterStep fixed_halfspace_outer(HalfSpace h) {
  validate_set(ConvexSet{h});
  return [h = std::move(h)](const Vector& z) {
    return project_halfspace(h, z);
  };
}

OuterStep identity_outer() {
  return [](const Vector& z) { return z; };
}

}  // namespace opsplit
