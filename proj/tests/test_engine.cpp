#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opsplit/engine.hpp"
#include "opsplit/random.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

using namespace opsplit;

namespace {

Vector scalar(double v) {
  Vector x(1);
  x << v;
  return x;
}

FirmOpHandle identity_firm() {
  FirmOpHandle t;
  t.apply = [](const Vector& x) { return x; };
  t.name = "identity";
  return t;
}

PseudoContractionHandle identity_pseudo(Eigen::Index dim) {
  PseudoContractionHandle r;
  r.apply = [](const Vector& x) { return x; };
  r.beta = 1e-12;
  r.domain = WholeSpace{dim};
  r.name = "identity";
  return r;
}

ProblemSpec identity_spec(Eigen::Index dim) {
  ProblemSpec spec;
  spec.dim = dim;
  spec.epsilon = 0.25;
  spec.t_schedule = [](int) { return identity_firm(); };
  spec.r_schedule = [dim](int) { return identity_pseudo(dim); };
  spec.q_schedule = [](int) { return identity_outer(); };
  spec.constraint_s = WholeSpace{dim};
  return spec;
}

// d = 1 scalar spec: R = Id - 0.5*Id, T = prox_{0.5|.|}, Q = Id.
ProblemSpec prox_spec() {
  ProblemSpec spec;
  spec.dim = 1;
  spec.epsilon = 0.25;
  spec.t_schedule = [](int) {
    FirmOpHandle t;
    t.apply = [](const Vector& x) {
      Vector out(1);
      out[0] = std::copysign(std::max(std::abs(x[0]) - 0.5, 0.0), x[0]);
      return out;
    };
    t.name = "prox";
    return t;
  };
  spec.r_schedule = [](int) {
    PseudoContractionHandle r;
    r.apply = [](const Vector& x) { return Vector(0.5 * x); };
    r.beta = 0.5;
    r.domain = WholeSpace{1};
    return r;
  };
  spec.q_schedule = [](int) { return identity_outer(); };
  spec.constraint_s = WholeSpace{1};
  return spec;
}

}  // namespace

TEST_CASE("identity spec converges at iteration 0 with residual 0") {
  const ProblemSpec spec = identity_spec(2);
  Vector x0(2);
  x0 << 0.7, -1.3;
  const RunResult run = engine_run(spec, zero_errors(2),
                                   constant_relaxation(1.0), x0, StopRule{});
  CHECK(run.status == RunStatus::converged);
  CHECK(run.iterations == 1);
  CHECK(run.trace.records.size() == 1);
  CHECK(run.trace.records[0].residual == 0.0);
  CHECK((run.final_x - x0).norm() == 0.0);
}

TEST_CASE("hand-executed scalar step: y=1 q=0.5 r=0.25 z=1.25") {
  const ProblemSpec spec = prox_spec();
  const StepResult step = engine_step(spec, zero_errors(1),
                                      constant_relaxation(1.0), 0, scalar(2));
  REQUIRE(!step.stopped());
  CHECK(step.record->y[0] == 1.0);
  CHECK(step.record->q[0] == 0.5);
  CHECK(step.record->r[0] == 0.25);
  CHECK(step.record->z[0] == 1.25);
  CHECK(step.record->x_next[0] == 1.25);
}

TEST_CASE("with lambda=1 and a half-space containing z, x_{n+1} = z_n") {
  ProblemSpec spec = prox_spec();
  // every z of this run stays below 10, so the cut never activates
  spec.q_schedule = [](int) {
    return fixed_halfspace_outer(HalfSpace{scalar(1.0), 10.0});
  };
  Vector x = scalar(2);
  for (int n = 0; n < 5; ++n) {
    const StepResult step =
        engine_step(spec, zero_errors(1), constant_relaxation(1.0), n, x);
    REQUIRE(!step.stopped());
    CHECK(step.record->x_next[0] == step.record->z[0]);
    CHECK(step.record->outer_gap == 0.0);
    x = step.record->x_next;
  }
}

TEST_CASE("q leaving dom R stops the run") {
  ProblemSpec spec = identity_spec(1);
  spec.r_schedule = [](int) {
    PseudoContractionHandle r = identity_pseudo(1);
    r.domain = Box{scalar(-1), scalar(1)};
    return r;
  };
  spec.t_schedule = [](int) {
    FirmOpHandle t;
    t.apply = [](const Vector& x) { return Vector(x.array() + 5.0); };
    return t;
  };
  const RunResult run =
      engine_run(spec, zero_errors(1), constant_relaxation(1.0), scalar(0.5),
                 StopRule{});
  CHECK(run.status == RunStatus::domain_stop);
  CHECK(run.stop_reason == "q outside domain");
  CHECK(run.trace.records.empty());
  CHECK(run.iterations == 0);
}

TEST_CASE("next iterate leaving dom R stops the run") {
  ProblemSpec spec = identity_spec(1);
  spec.r_schedule = [](int) {
    PseudoContractionHandle r = identity_pseudo(1);
    r.domain = Box{scalar(-1), scalar(1)};
    return r;
  };
  spec.q_schedule = [](int) {
    return OuterStep{[](const Vector& z) { return Vector(z.array() + 10.0); }};
  };
  const RunResult run =
      engine_run(spec, zero_errors(1), constant_relaxation(1.0), scalar(0.5),
                 StopRule{});
  CHECK(run.status == RunStatus::domain_stop);
  CHECK(run.stop_reason == "next iterate outside domain");
}

TEST_CASE("x0 outside dom R_0 is a precondition error, not a stop") {
  ProblemSpec spec = identity_spec(1);
  spec.r_schedule = [](int) {
    PseudoContractionHandle r = identity_pseudo(1);
    r.domain = Box{scalar(-1), scalar(1)};
    return r;
  };
  CHECK_THROWS_AS(engine_run(spec, zero_errors(1), constant_relaxation(1.0),
                             scalar(5), StopRule{}),
                  std::invalid_argument);
}

TEST_CASE("relaxation outside [eps, 1] is rejected before iteration 0") {
  const ProblemSpec spec = prox_spec();
  CHECK_THROWS_AS(engine_run(spec, zero_errors(1), constant_relaxation(1.5),
                             scalar(2), StopRule{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(engine_run(spec, zero_errors(1), constant_relaxation(0.1),
                             scalar(2), StopRule{}),
                  std::invalid_argument);
}

TEST_CASE("beta above 1 - epsilon is rejected") {
  ProblemSpec spec = prox_spec();
  spec.epsilon = 0.6;  // beta = 0.5 > 1 - 0.6
  CHECK_THROWS_AS(engine_step(spec, zero_errors(1), constant_relaxation(1.0),
                              0, scalar(2)),
                  std::invalid_argument);
}

TEST_CASE("zero-error run: nonincreasing distance to the solution") {
  const ProblemSpec spec = prox_spec();
  const RunResult run = engine_run(spec, zero_errors(1),
                                   constant_relaxation(1.0), scalar(2),
                                   StopRule{});
  CHECK(run.status == RunStatus::converged);
  CHECK(std::abs(run.final_x[0]) < 1e-8);
  const FejerReport audit = fejer_audit(run.trace, scalar(0));
  CHECK(audit.pass);
  CHECK(audit.violations.empty());
}

TEST_CASE("identity spec gives an equality chain under any reference") {
  const ProblemSpec spec = identity_spec(2);
  Vector x0(2);
  x0 << 3.0, -1.0;
  const RunResult run = engine_run(spec, zero_errors(2),
                                   constant_relaxation(1.0), x0, StopRule{});
  Vector ref(2);
  ref << -4.2, 0.9;
  const FejerReport audit = fejer_audit(run.trace, ref);
  CHECK(audit.pass);
  CHECK(audit.worst_excess <= 0.0);
}

TEST_CASE("fejer audit with summable errors uses the slack bound") {
  const ProblemSpec spec = prox_spec();
  const ErrorSchedule errs = summable_errors(1, 0.1, 2.0, 2024);
  StopRule stop;
  stop.max_iter = 400;
  stop.tol = 0.0;  // run the full horizon
  const RunResult run =
      engine_run(spec, errs, constant_relaxation(1.0), scalar(2), stop);
  CHECK(run.trace.records.size() == 400);
  const FejerReport audit = fejer_audit(run.trace, scalar(0));
  CHECK(audit.pass);

  // error bound column is 3||a|| + 2||b|| + ||c||
  const auto& rec = run.trace.records[3];
  const double expected =
      3.0 * errs.a(3).norm() + 2.0 * errs.b(3).norm() + errs.c(3).norm();
  CHECK(rec.error_bound == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("shadow mode measures e_n within the proof bound") {
  const ProblemSpec spec = prox_spec();
  const ErrorSchedule errs = summable_errors(1, 0.2, 2.0, 77);
  EngineOptions options;
  options.shadow = true;
  Vector x = scalar(1.5);
  for (int n = 0; n < 50; ++n) {
    const StepResult step =
        engine_step(spec, errs, constant_relaxation(1.0), n, x, options);
    REQUIRE(!step.stopped());
    CHECK(step.record->shadow_error <= step.record->error_bound + 1e-12);
    x = step.record->x_next;
  }
}

TEST_CASE("residual terms decrease and stay square-summable on zero errors") {
  const ProblemSpec spec = prox_spec();
  const RunResult run = engine_run(spec, zero_errors(1),
                                   constant_relaxation(1.0), scalar(2),
                                   StopRule{});
  double sum_sq = 0.0;
  for (const auto& rec : run.trace.records) {
    sum_sq += rec.residual * rec.residual;
    // ||z_n - x_n|| <= ||q_n - x_n|| + e_bound at every step
    CHECK((rec.z - rec.x).norm() <= rec.residual + rec.error_bound + 1e-12);
  }
  CHECK(sum_sq < 50.0);
  CHECK(run.trace.records.back().residual <= 1e-9);
}

TEST_CASE("summability checker accepts p=2 and rejects p=1 tails") {
  const ErrorSchedule good = summable_errors(1, 0.5, 2.0, 5);
  CHECK(check_summable(good.a, 4096));

  auto harmonic = [](int n) { return scalar(1.0 / (n + 1.0)); };
  CHECK_FALSE(check_summable(harmonic, 4096));
}

TEST_CASE("trace csv has the documented columns") {
  const ProblemSpec spec = prox_spec();
  const RunResult run = engine_run(spec, zero_errors(1),
                                   constant_relaxation(1.0), scalar(2),
                                   StopRule{});
  std::ostringstream out;
  run.trace.write_csv(out);
  const std::string text = out.str();
  CHECK(text.rfind("n,residual,outer_gap,error_bound,dist_to_ref\n", 0) == 0);
  const auto rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == static_cast<long>(run.trace.records.size()) + 1);
}
