#include "opsplit/equilibrium.hpp"

#include "opsplit/oracles.hpp"
#include "opsplit/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace opsplit {

Bifunction make_dc_quadratic_bifunction(double alpha, Vector anchor,
                                        Vector linear, ConvexSet c) {
  if (alpha < 0.0) {
    throw std::invalid_argument("dc_quadratic: alpha must be >= 0");
  }
  validate_set(c);
  const Eigen::Index d = dim_of(c);
  require_vector(anchor, d, "dc_quadratic: anchor");
  require_vector(linear, d, "dc_quadratic: linear");

  auto g = [alpha, anchor, linear](const Vector& y) {
    return 0.5 * alpha * (y - anchor).squaredNorm() + linear.dot(y);
  };
  Bifunction f;
  f.c = c;
  f.eval = [g](const Vector& x, const Vector& y) { return g(y) - g(x); };
  f.exact_resolvent = [alpha, anchor, linear, c](double gamma,
                                                 const Vector& x) {
    return exact_resolvent_dc(alpha, anchor, linear, c, gamma, x);
  };
  f.structure = "dc_quadratic";
  return f;
}

Bifunction make_vi_linear_bifunction(Matrix m, Box c) {
  validate_set(ConvexSet{c});
  const Eigen::Index d = c.lower.size();
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument("vi_linear: matrix dimension mismatch");
  }
  Bifunction f;
  f.c = c;
  f.eval = [m](const Vector& x, const Vector& y) {
    return (m * x).dot(y - x);
  };
  f.exact_resolvent = [m, c, d](double gamma, const Vector& x) {
    const Matrix system = Matrix::Identity(d, d) + gamma * m;
    return solve_affine_kkt(system, Vector(-x), c).point;
  };
  f.structure = "vi_linear";
  return f;
}

DeltaSchedule zero_delta() {
  return DeltaSchedule{[](int) { return 0.0; }};
}

DeltaSchedule power_delta(double scale, double exponent) {
  if (!(scale > 0.0) || !(exponent > 2.0)) {
    throw std::invalid_argument(
        "power_delta: need scale > 0 and exponent > 2 so that "
        "sum sqrt(delta_n) stays finite");
  }
  return DeltaSchedule{[scale, exponent](int n) {
    return scale / std::pow(static_cast<double>(n) + 1.0, exponent);
  }};
}

IndexControl cyclic_control(int m) {
  if (m < 1) throw std::invalid_argument("cyclic_control: m >= 1 required");
  IndexControl ctrl;
  ctrl.num_indices = m;
  ctrl.active = [m](int n) { return std::vector<int>{1 + (n % m)}; };
  ctrl.window.assign(m, m);
  ctrl.max_active = 1;
  return ctrl;
}

IndexControl explicit_control(std::vector<std::vector<int>> pattern,
                              std::vector<int> window, int max_active) {
  if (pattern.empty() || window.empty() || max_active < 1) {
    throw std::invalid_argument("explicit_control: malformed arguments");
  }
  IndexControl ctrl;
  ctrl.num_indices = static_cast<int>(window.size());
  ctrl.window = std::move(window);
  ctrl.max_active = max_active;
  ctrl.active = [pattern = std::move(pattern)](int n) {
    return pattern[n % pattern.size()];
  };
  return ctrl;
}

IndexControl random_audited_control(int m, int max_active,
                                    std::uint64_t seed) {
  if (m < 1 || max_active < 1) {
    throw std::invalid_argument("random_audited_control: malformed arguments");
  }
  IndexControl ctrl;
  ctrl.num_indices = m;
  ctrl.window.assign(m, m);
  ctrl.max_active = max_active;
  // The cyclically due index is always present, so every i recurs within m
  // steps regardless of the random extras.
  ctrl.active = [m, max_active, seed](int n) {
    std::set<int> chosen{1 + (n % m)};
    auto rng = make_rng(seed, "index-control", static_cast<std::uint64_t>(n));
    std::uniform_int_distribution<int> extra_count(0, max_active - 1);
    std::uniform_int_distribution<int> pick(1, m);
    const int extras = extra_count(rng);
    for (int k = 0; k < extras; ++k) chosen.insert(pick(rng));
    return std::vector<int>(chosen.begin(), chosen.end());
  };
  return ctrl;
}

WeightScheme uniform_weights(const IndexControl& ctrl) {
  return WeightScheme{[active = ctrl.active](int, int n) {
    return 1.0 / static_cast<double>(active(n).size());
  }};
}

IndexControlReport validate_index_control(const IndexControl& ctrl,
                                          int horizon) {
  const int max_window =
      *std::max_element(ctrl.window.begin(), ctrl.window.end());
  if (horizon < max_window) {
    throw std::invalid_argument(
        "validate_index_control: horizon must cover max window");
  }
  std::vector<std::vector<int>> cached(horizon + max_window);
  for (int n = 0; n < horizon + max_window; ++n) cached[n] = ctrl.active(n);

  IndexControlReport report;
  for (int n = 0; n <= horizon; ++n) {
    const auto& i_n = cached[n];
    const int card = static_cast<int>(i_n.size());
    if (card < 1 || card > ctrl.max_active) {
      report.pass = false;
      report.first_violation_n = n;
      report.violating_index = -1;
      report.reason = "cardinality outside [1, N] at n=" + std::to_string(n);
      return report;
    }
    for (const int i : i_n) {
      if (i < 1 || i > ctrl.num_indices) {
        report.pass = false;
        report.first_violation_n = n;
        report.violating_index = i;
        report.reason = "index out of range at n=" + std::to_string(n);
        return report;
      }
    }
    for (int i = 1; i <= ctrl.num_indices; ++i) {
      const int window = ctrl.window[i - 1];
      bool found = false;
      for (int k = n; k < n + window && !found; ++k) {
        const auto& set_k = cached[k];
        found = std::find(set_k.begin(), set_k.end(), i) != set_k.end();
      }
      if (!found) {
        report.pass = false;
        report.first_violation_n = n;
        report.violating_index = i;
        report.reason = "index " + std::to_string(i) +
                        " starved in window starting at n=" +
                        std::to_string(n);
        return report;
      }
    }
  }
  return report;
}

Vector exact_resolvent_dc(double alpha, const Vector& anchor,
                          const Vector& linear, const ConvexSet& c,
                          double gamma, const Vector& x) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("exact_resolvent_dc: gamma must be > 0");
  }
  // gamma*g(y) + (1/2)||y - x||^2 is (1 + gamma*alpha)/2 * ||y - w||^2 up to
  // a constant, so the constrained minimizer is the projection of w.
  const Vector w =
      (x + gamma * alpha * anchor - gamma * linear) / (1.0 + gamma * alpha);
  return project(c, w);
}

namespace {

Vector perturbed_member(const Bifunction& f, const Vector& exact,
                        const Vector& perturbation) {
  return project(f.c, exact + perturbation);
}

}  // namespace

Vector delta_resolvent(const Bifunction& f, double gamma, double delta,
                       const Vector& x, const Vector& perturbation) {
  if (!(gamma > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument(
        "delta_resolvent: gamma and delta must be > 0");
  }
  const double limit = std::sqrt(delta);
  if (perturbation.norm() > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "delta_resolvent: perturbation exceeds sqrt(delta)");
  }
  return perturbed_member(f, f.exact_resolvent(gamma, x), perturbation);
}

Vector averaged_projection(const std::vector<ConvexSet>& sets,
                           const std::vector<double>& weights,
                           const Vector& z) {
  if (sets.size() != weights.size() || sets.empty()) {
    throw std::invalid_argument(
        "averaged_projection: weight/set count mismatch");
  }
  double total = 0.0;
  for (const double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "averaged_projection: weights must sum to 1");
  }
  Vector out = Vector::Zero(z.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out += weights[i] * project(sets[i], z);
  }
  return out;
}

namespace {

double checked_gamma_eq(const EquilibriumProblem& p, const GammaSchedule& g,
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

void validate_problem(const EquilibriumProblem& p,
                      const EquilibriumSchedules& s) {
  if (p.sets.empty()) {
    throw std::invalid_argument("equilibrium problem: no constraint sets");
  }
  const double chi = p.b.lipschitz;
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0 / (chi + 1.0))) {
    throw std::invalid_argument(
        "equilibrium problem: epsilon must lie in (0, 1/(chi+1))");
  }
  if (s.control.num_indices != static_cast<int>(p.sets.size())) {
    throw std::invalid_argument(
        "equilibrium problem: index control covers a different number of "
        "sets");
  }
  for (const auto& set : p.sets) validate_set(set);
}

}  // namespace

EquilibriumStepResult equilibrium_step(const EquilibriumProblem& p,
                                       const EquilibriumSchedules& s, int n,
                                       const Vector& x_n) {
  const double gamma = checked_gamma_eq(p, s.gamma, n);
  if (!contains(p.b.domain, x_n)) {
    throw std::invalid_argument("equilibrium_step: x_n outside dom B");
  }
  const Vector e1 = s.errors.e1(n);
  const Vector e2 = s.errors.e2(n);
  const double delta = s.delta.delta(n);
  if (delta < 0.0) {
    throw std::invalid_argument("equilibrium_step: delta_n < 0");
  }

  StepRecord rec;
  rec.n = n;
  rec.x = x_n;
  rec.y = x_n - gamma * (p.b.apply(x_n) + e1);

  const Vector exact = p.f.exact_resolvent(gamma, rec.y);
  if (delta > 0.0 && s.perturbation.enabled) {
    auto rng = make_rng(s.perturbation.seed, "delta-perturb",
                        static_cast<std::uint64_t>(n));
    const Vector perturbation =
        0.9 * std::sqrt(delta) * unit_direction(rng, p.dim);
    rec.q = perturbed_member(p.f, exact, perturbation);
  } else {
    rec.q = exact;
  }
  const double b_norm = (rec.q - exact).norm();

  if (!contains(p.b.domain, rec.q)) {
    throw std::runtime_error(
        "equilibrium_step: q_n outside dom B (C subset dom B violated)");
  }
  rec.r = rec.q - gamma * (p.b.apply(rec.q) + e2);
  rec.z = rec.x - rec.y + rec.r;

  const std::vector<int> active = s.control.active(n);
  if (active.empty() ||
      static_cast<int>(active.size()) > s.control.max_active) {
    throw std::invalid_argument(
        "equilibrium_step: |I_n| outside [1, N] at n=" + std::to_string(n));
  }
  std::vector<ConvexSet> active_sets;
  std::vector<double> weights;
  double total = 0.0;
  for (const int i : active) {
    if (i < 1 || i > static_cast<int>(p.sets.size())) {
      throw std::invalid_argument("equilibrium_step: index out of range");
    }
    const double w = s.weights.omega(i, n);
    if (!(w >= p.epsilon - 1e-15 && w <= 1.0 + 1e-15)) {
      throw std::invalid_argument(
          "equilibrium_step: weight outside [epsilon, 1]");
    }
    active_sets.push_back(p.sets[i - 1]);
    weights.push_back(w);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "equilibrium_step: weights over I_n must sum to 1");
  }
  rec.x_next = averaged_projection(active_sets, weights, rec.z);

  rec.outer_gap = (rec.z - rec.x_next).norm();
  rec.residual = (rec.q - rec.x).norm();
  // a_n = -gamma e1, b_n = q_n - J_{gamma F} y_n (measured exactly),
  // c_n = -gamma e2.
  rec.error_bound = 3.0 * gamma * e1.norm() + 2.0 * b_norm + gamma * e2.norm();
  double worst = 0.0;
  for (const auto& set : p.sets) {
    worst = std::max(worst, feasibility_distance(set, rec.x_next));
  }
  rec.feasibility = worst;
  return EquilibriumStepResult{std::move(rec)};
}

double equilibrium_residual(const EquilibriumProblem& p, double gamma,
                            const Vector& x) {
  const Vector forward = x - gamma * p.b.apply(x);
  return (p.f.exact_resolvent(gamma, forward) - x).norm();
}

EquilibriumResult solve_equilibrium(const EquilibriumProblem& p,
                                    const EquilibriumSchedules& s,
                                    const Vector& x0, const StopRule& stop,
                                    const EquilibriumOptions& options) {
  validate_problem(p, s);
  require_vector(x0, p.dim, "solve_equilibrium: x0");
  if (!contains(p.b.domain, x0)) {
    throw std::invalid_argument("solve_equilibrium: x0 outside dom B");
  }

  EquilibriumResult result;
  Vector x = x0;
  auto converged = [&](const Vector& point, double gamma) {
    result.final_residual = equilibrium_residual(p, gamma, point);
    double worst = 0.0;
    for (const auto& set : p.sets) {
      worst = std::max(worst, feasibility_distance(set, point));
    }
    result.final_feasibility = worst;
    return result.final_residual <= stop.tol &&
           result.final_feasibility <= stop.feas_tol;
  };

  if (converged(x, checked_gamma_eq(p, s.gamma, 0))) {
    result.status = RunStatus::converged;
    result.solution = x;
    return result;
  }
  for (int n = 0; n < stop.max_iter; ++n) {
    EquilibriumStepResult step = equilibrium_step(p, s, n, x);
    x = step.record.x_next;
    if (options.reference) {
      step.record.dist_to_ref = (step.record.x - *options.reference).norm();
    }
    result.trace.records.push_back(std::move(step.record));
    result.iterations = n + 1;
    if (converged(x, s.gamma.gamma(n))) {
      result.status = RunStatus::converged;
      result.solution = x;
      return result;
    }
  }
  result.status = RunStatus::max_iter;
  result.solution = x;
  return result;
}

EquilibriumErrors zero_equilibrium_errors(Eigen::Index dim) {
  auto zero = [dim](int) { return Vector(Vector::Zero(dim)); };
  return EquilibriumErrors{zero, zero};
}

EquilibriumErrors summable_equilibrium_errors(Eigen::Index dim, double coeff,
                                              double power,
                                              std::uint64_t seed) {
  const ErrorSchedule s = summable_errors(dim, coeff, power, seed);
  return EquilibriumErrors{s.a, s.c};
}

VerificationReport verify_bifunction(const Bifunction& f, int samples,
                                     std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("verify_bifunction: samples must be >= 1");
  }
  VerificationReport report;

  auto run = [&](const char* check, double tolerance, int points,
                 auto&& margin) {
    CertificateReport cert;
    cert.check = check;
    cert.subject = f.structure;
    cert.samples = samples;
    cert.tolerance = tolerance;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    auto rng = make_rng(seed, check);
    std::vector<Vector> pts(points);
    for (int k = 0; k < samples; ++k) {
      for (int j = 0; j < points; ++j) pts[j] = sample_in_set(rng, f.c);
      const double m = margin(pts);
      if (m < cert.worst_margin) {
        cert.worst_margin = m;
        cert.worst_sample = k;
      }
    }
    cert.pass = cert.worst_margin >= -tolerance;
    report.checks.push_back(std::move(cert));
  };

  run("bifunction-identity", 1e-10, 1, [&](const std::vector<Vector>& p) {
    return -std::abs(f.eval(p[0], p[0]));
  });
  run("bifunction-skew", 1e-10, 2, [&](const std::vector<Vector>& p) {
    return -(f.eval(p[0], p[1]) + f.eval(p[1], p[0]));
  });
  run("bifunction-convexity", 1e-9, 3, [&](const std::vector<Vector>& p) {
    const Vector mid = 0.5 * (p[1] + p[2]);
    return 0.5 * f.eval(p[0], p[1]) + 0.5 * f.eval(p[0], p[2]) -
           f.eval(p[0], mid);
  });
  return report;
}

}  // namespace opsplit
