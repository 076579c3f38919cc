#include "opsplit/inclusion.hpp"

#include "opsplit/random.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace opsplit {

Constraint affine_constraint(Vector normal, double offset) {
  if (!(normal.norm() > 0.0)) {
    throw std::invalid_argument("affine_constraint: zero normal");
  }
  Constraint c;
  c.f = [normal, offset](const Vector& x) { return normal.dot(x) - offset; };
  c.subgrad = [normal](const Vector&) { return normal; };
  c.tag = "affine";
  return c;
}

Constraint ball_distance_constraint(Vector center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ball_distance_constraint: radius <= 0");
  }
  Constraint c;
  c.f = [center, radius](const Vector& x) {
    return (x - center).norm() - radius;
  };
  c.subgrad = [center](const Vector& x) {
    const Vector diff = x - center;
    const double d = diff.norm();
    if (d == 0.0) return Vector(Vector::Zero(x.size()));
    return Vector(diff / d);
  };
  c.tag = "ball-distance";
  return c;
}

Constraint trivial_constraint(Eigen::Index dim) {
  Constraint c;
  c.f = [](const Vector&) { return -1.0; };
  c.subgrad = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  c.tag = "trivial";
  return c;
}

InclusionErrors zero_inclusion_errors(Eigen::Index dim) {
  auto zero = [dim](int) { return Vector(Vector::Zero(dim)); };
  return InclusionErrors{zero, zero, zero};
}

InclusionErrors summable_inclusion_errors(Eigen::Index dim, double coeff,
                                          double power, std::uint64_t seed) {
  const ErrorSchedule s = summable_errors(dim, coeff, power, seed);
  return InclusionErrors{s.a, s.b, s.c};
}

SubgradientProjection subgradient_project(const Constraint& c,
                                          const Vector& x) {
  const double fx = c.f(x);
  const Vector u = c.subgrad(x);
  const double uu = u.squaredNorm();
  SubgradientProjection out;
  if (fx > 0.0) {
    if (!(uu > 0.0)) {
      throw std::runtime_error(
          "subgradient_project: f(x) > 0 with zero subgradient certifies an "
          "infeasible constraint");
    }
    out.point = x - (fx / uu) * u;
  } else {
    out.point = x;
  }
  if (uu > 0.0) {
    // {y : <u, y> <= <u, x> - f(x)}, which contains lev_{<=0} f.
    out.halfspace = HalfSpace{u, u.dot(x) - fx};
  }
  return out;
}

int cyclic_index(int m, int n) {
  if (m < 1 || n < 0) {
    throw std::invalid_argument("cyclic_index: require m >= 1 and n >= 0");
  }
  return 1 + (n % m);
}

namespace {

double checked_gamma(const InclusionProblem& p, const GammaSchedule& g,
                     int n) {
  const double gamma = g.gamma(n);
  const double hi = (1.0 - p.epsilon) / p.b.lipschitz;
  if (!(gamma >= p.epsilon && gamma <= hi)) {
    throw std::invalid_argument(
        "gamma schedule: gamma_" + std::to_string(n) + " = " +
        std::to_string(gamma) + " outside [epsilon, (1-epsilon)/chi]");
  }
  return gamma;
}

void validate_problem(const InclusionProblem& p) {
  if (p.constraints.empty()) {
    throw std::invalid_argument("inclusion problem: need m >= 1 constraints");
  }
  const double chi = p.b.lipschitz;
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0 / (chi + 1.0))) {
    throw std::invalid_argument(
        "inclusion problem: epsilon must lie in (0, 1/(chi+1))");
  }
}

}  // namespace

TsengStepResult tseng_step(const InclusionProblem& p, const GammaSchedule& g,
                           const InclusionErrors& errs, int n,
                           const Vector& x_n) {
  const double gamma = checked_gamma(p, g, n);
  if (!contains(p.b.domain, x_n)) {
    throw std::invalid_argument("tseng_step: x_n outside dom B");
  }
  const Vector e1 = errs.e1(n);
  const Vector e2 = errs.e2(n);
  const Vector e3 = errs.e3(n);

  StepRecord rec;
  rec.n = n;
  rec.x = x_n;
  rec.y = x_n - gamma * (p.b.apply(x_n) + e1);
  rec.q = p.a.resolve(gamma, rec.y + e2);
  if (!contains(p.b.domain, rec.q)) {
    throw std::runtime_error(
        "tseng_step: q_n outside dom B (dom A subset dom B violated)");
  }
  rec.r = rec.q - gamma * (p.b.apply(rec.q) + e3);
  rec.z = rec.x - rec.y + rec.r;

  const int m = static_cast<int>(p.constraints.size());
  const Constraint& active = p.constraints[cyclic_index(m, n) - 1];
  const SubgradientProjection proj = subgradient_project(active, rec.z);
  rec.x_next = proj.point;
  rec.outer_gap = (rec.z - rec.x_next).norm();
  rec.residual = (rec.q - rec.x).norm();
  // a_n = -gamma e1, c_n = -gamma e3; the resolvent perturbation enters as
  // b_n = J(y+e2) - J(y) with ||b_n|| <= ||e2|| by nonexpansiveness.
  rec.error_bound =
      3.0 * gamma * e1.norm() + 2.0 * e2.norm() + gamma * e3.norm();
  rec.feasibility = constraint_violation(p.constraints, rec.x_next);
  return TsengStepResult{std::move(rec)};
}

double constraint_violation(const std::vector<Constraint>& constraints,
                            const Vector& x) {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, c.f(x));
  return std::max(0.0, worst);
}

double inclusion_residual(const InclusionProblem& p, double gamma,
                          const Vector& x) {
  const Vector forward = x - gamma * p.b.apply(x);
  return (p.a.resolve(gamma, forward) - x).norm();
}

InclusionResult solve_inclusion(const InclusionProblem& p,
                                const GammaSchedule& g,
                                const InclusionErrors& errs, const Vector& x0,
                                const StopRule& stop,
                                const InclusionOptions& options) {
  validate_problem(p);
  require_vector(x0, p.dim, "solve_inclusion: x0");
  if (!contains(p.b.domain, x0)) {
    throw std::invalid_argument("solve_inclusion: x0 outside dom B");
  }

  InclusionResult result;
  Vector x = x0;
  auto converged = [&](const Vector& point, double gamma) {
    result.final_residual = inclusion_residual(p, gamma, point);
    result.final_feasibility = constraint_violation(p.constraints, point);
    return result.final_residual <= stop.tol &&
           result.final_feasibility <= stop.feas_tol;
  };

  if (converged(x, checked_gamma(p, g, 0))) {
    result.status = RunStatus::converged;
    result.solution = x;
    return result;
  }
  for (int n = 0; n < stop.max_iter; ++n) {
    TsengStepResult step = tseng_step(p, g, errs, n, x);
    x = step.record.x_next;
    if (options.reference) {
      step.record.dist_to_ref = (step.record.x - *options.reference).norm();
    }
    result.trace.records.push_back(std::move(step.record));
    result.iterations = n + 1;
    if (converged(x, g.gamma(n))) {
      result.status = RunStatus::converged;
      result.solution = x;
      return result;
    }
  }
  result.status = RunStatus::max_iter;
  result.solution = x;
  return result;
}

VerificationReport verify_constraints(const std::vector<Constraint>& cs,
                                      Eigen::Index dim, int samples,
                                      std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("verify_constraints: samples must be >= 1");
  }
  VerificationReport report;
  const ConvexSet region = WholeSpace{dim};
  for (std::size_t idx = 0; idx < cs.size(); ++idx) {
    const Constraint& c = cs[idx];
    CertificateReport cert;
    cert.check = "subgradient-validity";
    cert.subject = c.tag + "[" + std::to_string(idx + 1) + "]";
    cert.samples = samples;
    cert.tolerance = 1e-9;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    auto rng = make_rng(seed, "subgradient", idx);
    for (int k = 0; k < samples; ++k) {
      const Vector x = sample_in_set(rng, region);
      const Vector y = sample_in_set(rng, region);
      const double margin = c.f(y) - c.f(x) - c.subgrad(x).dot(y - x);
      if (margin < cert.worst_margin) {
        cert.worst_margin = margin;
        cert.worst_sample = k;
      }
    }
    cert.pass = cert.worst_margin >= -cert.tolerance;
    report.checks.push_back(std::move(cert));
  }
  return report;
}

std::tuple<ProblemSpec, ErrorSchedule, RelaxationSchedule> as_engine_spec(
    const InclusionProblem& p, const GammaSchedule& g,
    const InclusionErrors& errs) {
  validate_problem(p);

  ProblemSpec spec;
  spec.dim = p.dim;
  spec.epsilon = p.epsilon;

  spec.t_schedule = [p, g, errs](int n) {
    const double gamma = checked_gamma(p, g, n);
    FirmOpHandle t;
    // Perturbed resolvent evaluation: q = J_{gamma A}(y + e2), so the
    // engine's additive b_n is identically zero.
    t.apply = [p, errs, gamma, n](const Vector& y) {
      return p.a.resolve(gamma, y + errs.e2(n));
    };
    t.name = "J_{gamma A}";
    return t;
  };
  spec.r_schedule = [p, g](int n) {
    return forward_operator(p.b, checked_gamma(p, g, n));
  };
  spec.q_schedule = [p](int n) -> OuterStep {
    const int m = static_cast<int>(p.constraints.size());
    const Constraint active = p.constraints[cyclic_index(m, n) - 1];
    return [active](const Vector& z) {
      return subgradient_project(active, z).point;
    };
  };

  // S is a level-set intersection, not a canonical descriptor; the solver
  // front end reports feasibility through constraint_violation instead.
  spec.constraint_s = WholeSpace{p.dim};

  ErrorSchedule mapped;
  mapped.a = [p, g, errs](int n) {
    return Vector(-checked_gamma(p, g, n) * errs.e1(n));
  };
  mapped.b = [p](int) { return Vector(Vector::Zero(p.dim)); };
  mapped.c = [p, g, errs](int n) {
    return Vector(-checked_gamma(p, g, n) * errs.e3(n));
  };

  return {std::move(spec), std::move(mapped), constant_relaxation(1.0)};
}

}  // namespace opsplit
