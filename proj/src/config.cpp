#include "opsplit/config.hpp"

#include "opsplit/oracles.hpp"
#include "opsplit/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace opsplit {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json& require_field(const json& j, const std::string& path,
                          const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(path + "." + key, "missing required field");
  }
  return j.at(key);
}

double require_number(const json& j, const std::string& path,
                      const char* key) {
  const json& v = require_field(j, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double optional_number(const json& j, const std::string& path,
                       const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int require_int(const json& j, const std::string& path, const char* key) {
  const json& v = require_field(j, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string require_string(const json& j, const std::string& path,
                           const char* key) {
  const json& v = require_field(j, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string type_tag(const json& j, const std::string& path) {
  return require_string(j, path, "type");
}

Vector parse_vector(const json& j, const std::string& path,
                    Eigen::Index expected_dim) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (expected_dim >= 0 && out.size() != expected_dim) {
    fail(path, "expected " + std::to_string(expected_dim) + " entries, got " +
                   std::to_string(out.size()));
  }
  if (!all_finite(out)) fail(path, "non-finite entry");
  return out;
}

Vector require_vector_field(const json& j, const std::string& path,
                            const char* key, Eigen::Index dim) {
  return parse_vector(require_field(j, path, key), path + "." + key, dim);
}

Matrix parse_matrix(const json& j, const std::string& path,
                    Eigen::Index dim) {
  const Vector flat = parse_vector(j, path, dim * dim);
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c];
  }
  return m;
}

BasicSet parse_basic_set(const json& j, const std::string& path,
                         Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  if (tag == "box") {
    Box b{require_vector_field(j, path, "lower", dim),
          require_vector_field(j, path, "upper", dim)};
    return b;
  }
  if (tag == "ball") {
    Ball b{require_vector_field(j, path, "center", dim),
           require_number(j, path, "radius")};
    return b;
  }
  if (tag == "halfspace") {
    HalfSpace h{require_vector_field(j, path, "normal", dim),
                require_number(j, path, "offset")};
    return h;
  }
  if (tag == "whole") {
    return WholeSpace{dim};
  }
  fail(path + ".type", "unknown set type '" + tag + "'");
}

ConvexSet parse_set(const json& j, const std::string& path,
                    Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  ConvexSet set;
  if (tag == "intersection") {
    const json& members = require_field(j, path, "members");
    if (!members.is_array() || members.empty()) {
      fail(path + ".members", "expected a non-empty array of sets");
    }
    Intersection inter;
    for (std::size_t i = 0; i < members.size(); ++i) {
      inter.members.push_back(parse_basic_set(
          members[i], path + ".members[" + std::to_string(i) + "]", dim));
    }
    set = inter;
  } else {
    set = std::visit([](auto&& s) { return ConvexSet{s}; },
                     parse_basic_set(j, path, dim));
  }
  try {
    validate_set(set);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return set;
}

MonotoneMap parse_operator_b(const json& j, const std::string& path,
                             Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  ConvexSet domain = WholeSpace{dim};
  if (j.contains("domain")) {
    domain = parse_set(j.at("domain"), path + ".domain", dim);
  }
  if (tag == "identity") {
    MonotoneMap b = make_identity_map(dim);
    b.domain = domain;
    return b;
  }
  if (tag == "zero") {
    MonotoneMap b = make_zero_map(dim, optional_number(j, path, "lipschitz",
                                                       1e-9));
    b.domain = domain;
    return b;
  }
  if (tag == "linear") {
    const Matrix m =
        parse_matrix(require_field(j, path, "matrix"), path + ".matrix", dim);
    Vector shift = Vector::Zero(dim);
    if (j.contains("shift")) {
      shift = require_vector_field(j, path, "shift", dim);
    }
    const double chi = require_number(j, path, "lipschitz");
    if (!(chi > 0.0)) fail(path + ".lipschitz", "must be > 0");
    return make_linear_map(m, shift, domain, chi);
  }
  fail(path + ".type", "unknown operator type '" + tag + "'");
}

ResolventOracle parse_operator_a(const json& j, const std::string& path,
                                 Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  if (tag == "normal_cone") {
    return make_normal_cone_resolvent(
        parse_set(require_field(j, path, "set"), path + ".set", dim));
  }
  if (tag == "affine") {
    const Matrix m =
        parse_matrix(require_field(j, path, "matrix"), path + ".matrix", dim);
    Vector shift = Vector::Zero(dim);
    if (j.contains("shift")) {
      shift = require_vector_field(j, path, "shift", dim);
    }
    return make_affine_resolvent(m, shift);
  }
  if (tag == "prox_abs") {
    if (dim != 1) fail(path, "prox_abs requires dim == 1");
    ResolventOracle oracle;
    oracle.domain_a = WholeSpace{1};
    oracle.resolve = [](double gamma, const Vector& x) {
      Vector out(1);
      out[0] = prox_abs(gamma, x[0]);
      return out;
    };
    oracle.name = "prox |.|";
    return oracle;
  }
  if (tag == "identity") {
    ResolventOracle oracle;
    oracle.domain_a = WholeSpace{dim};
    oracle.resolve = [](double, const Vector& x) { return x; };
    oracle.name = "identity resolvent";
    return oracle;
  }
  fail(path + ".type", "unknown operator type '" + tag + "'");
}

Constraint parse_constraint(const json& j, const std::string& path,
                            Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  if (tag == "affine") {
    return affine_constraint(require_vector_field(j, path, "normal", dim),
                             require_number(j, path, "offset"));
  }
  if (tag == "ball-distance") {
    return ball_distance_constraint(
        require_vector_field(j, path, "center", dim),
        require_number(j, path, "radius"));
  }
  if (tag == "trivial") {
    return trivial_constraint(dim);
  }
  fail(path + ".type", "unknown constraint type '" + tag + "'");
}

GammaSchedule parse_gamma(const json& schedules, const std::string& path) {
  if (!schedules.contains("gamma")) {
    fail(path + ".gamma", "missing required field");
  }
  const json& j = schedules.at("gamma");
  const std::string tag = type_tag(j, path + ".gamma");
  if (tag == "constant") {
    return constant_gamma(require_number(j, path + ".gamma", "value"));
  }
  fail(path + ".gamma.type", "unknown schedule '" + tag + "'");
}

void check_gamma_bounds(const GammaSchedule& g, double epsilon, double chi,
                        const std::string& path) {
  const double hi = (1.0 - epsilon) / chi;
  const double g0 = g.gamma(0);
  if (!(g0 >= epsilon && g0 <= hi)) {
    fail(path, "gamma = " + std::to_string(g0) +
                   " outside [epsilon, (1-epsilon)/chi] = [" +
                   std::to_string(epsilon) + ", " + std::to_string(hi) + "]");
  }
}

DeltaSchedule parse_delta(const json& schedules, const std::string& path) {
  if (!schedules.contains("delta")) return zero_delta();
  const json& j = schedules.at("delta");
  const std::string tag = type_tag(j, path + ".delta");
  if (tag == "zero") return zero_delta();
  if (tag == "power") {
    try {
      return power_delta(require_number(j, path + ".delta", "scale"),
                         require_number(j, path + ".delta", "exponent"));
    } catch (const std::invalid_argument& e) {
      fail(path + ".delta", e.what());
    }
  }
  fail(path + ".delta.type", "unknown schedule '" + tag + "'");
}

struct ErrorRule {
  std::string tag = "zero";
  double coeff = 0.0;
  double power = 2.0;
};

ErrorRule parse_error_rule(const json& schedules, const std::string& path) {
  ErrorRule rule;
  if (!schedules.contains("errors")) return rule;
  const json& j = schedules.at("errors");
  rule.tag = type_tag(j, path + ".errors");
  if (rule.tag == "zero") return rule;
  if (rule.tag == "summable") {
    rule.coeff = require_number(j, path + ".errors", "coeff");
    rule.power = require_number(j, path + ".errors", "power");
    if (!(rule.power > 1.0)) {
      fail(path + ".errors.power", "must exceed 1 for summability");
    }
    return rule;
  }
  fail(path + ".errors.type", "unknown schedule '" + rule.tag + "'");
}

IndexControl parse_index_control(const json& j, const std::string& path,
                                 int num_sets, std::uint64_t seed) {
  const std::string tag = type_tag(j, path);
  if (tag == "cyclic") return cyclic_control(num_sets);
  if (tag == "uniform-random-audited") {
    const int max_active = require_int(j, path, "max_active");
    if (max_active < 1 || max_active > num_sets) {
      fail(path + ".max_active", "must lie in [1, number of sets]");
    }
    return random_audited_control(num_sets, max_active,
                                  mix_seed(seed, "index-control"));
  }
  if (tag == "explicit") {
    const json& pattern_json = require_field(j, path, "pattern");
    if (!pattern_json.is_array() || pattern_json.empty()) {
      fail(path + ".pattern", "expected a non-empty array of index lists");
    }
    std::vector<std::vector<int>> pattern;
    for (const auto& entry : pattern_json) {
      if (!entry.is_array() || entry.empty()) {
        fail(path + ".pattern", "each entry must be a non-empty index list");
      }
      pattern.push_back(entry.get<std::vector<int>>());
    }
    const json& window_json = require_field(j, path, "window");
    std::vector<int> window = window_json.get<std::vector<int>>();
    if (static_cast<int>(window.size()) != num_sets) {
      fail(path + ".window", "needs one window per set");
    }
    return explicit_control(std::move(pattern), std::move(window),
                            require_int(j, path, "max_active"));
  }
  fail(path + ".type", "unknown index control '" + tag + "'");
}

Bifunction parse_bifunction(const json& j, const std::string& path,
                            Eigen::Index dim) {
  const std::string tag = type_tag(j, path);
  const ConvexSet c =
      parse_set(require_field(j, path, "feasible_set"), path + ".feasible_set",
                dim);
  if (tag == "dc_quadratic") {
    const double alpha = require_number(j, path, "alpha");
    Vector anchor = Vector::Zero(dim);
    Vector linear = Vector::Zero(dim);
    if (j.contains("anchor")) {
      anchor = require_vector_field(j, path, "anchor", dim);
    }
    if (j.contains("linear")) {
      linear = require_vector_field(j, path, "linear", dim);
    }
    if (alpha < 0.0) fail(path + ".alpha", "must be >= 0");
    return make_dc_quadratic_bifunction(alpha, anchor, linear, c);
  }
  if (tag == "vi_linear") {
    const Matrix m =
        parse_matrix(require_field(j, path, "matrix"), path + ".matrix", dim);
    const Box* box = std::get_if<Box>(&c);
    if (box == nullptr) {
      fail(path + ".feasible_set", "vi_linear requires a box feasible set");
    }
    if (dim > 4) fail(path, "vi_linear supports dim <= 4");
    return make_vi_linear_bifunction(m, *box);
  }
  fail(path + ".type", "unknown bifunction '" + tag + "'");
}

int compute_line(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

LoadedConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" +
                      std::to_string(compute_line(text, e.byte)) + ": " +
                      e.what());
  }

  try {
    LoadedConfig cfg;
    const json& problem = require_field(root, "$", "problem");
    cfg.kind = require_string(problem, "problem", "kind");
    const int dim = require_int(problem, "problem", "dim");
    if (dim < 1) fail("problem.dim", "must be >= 1");
    cfg.dim = dim;

    const json& seed_field = require_field(root, "$", "seed");
    if (!seed_field.is_number_integer()) fail("seed", "expected an integer");
    cfg.seed = seed_field.get<std::uint64_t>();

    cfg.x0 = parse_vector(require_field(root, "$", "x0"), "x0", cfg.dim);
    if (root.contains("reference")) {
      cfg.reference = parse_vector(root.at("reference"), "reference", cfg.dim);
    }
    if (root.contains("output")) {
      if (!root.at("output").is_string()) fail("output", "expected a string");
      cfg.output = root.at("output").get<std::string>();
    }

    if (cfg.kind == "inclusion" || cfg.kind == "equilibrium") {
      cfg.stop = StopRule{100000, 1e-8, 1e-8};  // solver front-end defaults
    }
    if (root.contains("stop")) {
      const json& stop = root.at("stop");
      cfg.stop.max_iter = static_cast<int>(
          optional_number(stop, "stop", "max_iter", cfg.stop.max_iter));
      if (cfg.stop.max_iter < 1) fail("stop.max_iter", "must be >= 1");
      cfg.stop.tol = optional_number(stop, "stop", "tol", cfg.stop.tol);
      cfg.stop.feas_tol =
          optional_number(stop, "stop", "feas_tol", cfg.stop.feas_tol);
      if (!(cfg.stop.tol >= 0.0) || !(cfg.stop.feas_tol >= 0.0)) {
        fail("stop", "tolerances must be >= 0");
      }
    }

    const json schedules =
        root.contains("schedules") ? root.at("schedules") : json::object();
    const double epsilon = require_number(problem, "problem", "epsilon");

    if (cfg.kind == "inclusion") {
      InclusionProblem p;
      p.dim = cfg.dim;
      p.epsilon = epsilon;
      p.a = parse_operator_a(require_field(problem, "problem", "operator_a"),
                             "problem.operator_a", cfg.dim);
      p.b = parse_operator_b(require_field(problem, "problem", "operator_b"),
                             "problem.operator_b", cfg.dim);
      const json& constraints =
          require_field(problem, "problem", "constraints");
      if (!constraints.is_array() || constraints.empty()) {
        fail("problem.constraints", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < constraints.size(); ++i) {
        p.constraints.push_back(parse_constraint(
            constraints[i], "problem.constraints[" + std::to_string(i) + "]",
            cfg.dim));
      }
      const double chi = p.b.lipschitz;
      if (!(epsilon > 0.0 && epsilon < 1.0 / (chi + 1.0))) {
        fail("problem.epsilon", "must lie in (0, 1/(chi+1)) = (0, " +
                                    std::to_string(1.0 / (chi + 1.0)) + ")");
      }
      cfg.gamma = parse_gamma(schedules, "schedules");
      check_gamma_bounds(cfg.gamma, epsilon, chi, "schedules.gamma");
      const ErrorRule rule = parse_error_rule(schedules, "schedules");
      cfg.inclusion_errors =
          rule.tag == "zero"
              ? zero_inclusion_errors(cfg.dim)
              : summable_inclusion_errors(cfg.dim, rule.coeff, rule.power,
                                          mix_seed(cfg.seed, "inclusion-err"));
      cfg.inclusion = std::move(p);
      return cfg;
    }

    if (cfg.kind == "equilibrium") {
      EquilibriumProblem p;
      p.dim = cfg.dim;
      p.epsilon = epsilon;
      p.f = parse_bifunction(require_field(problem, "problem", "bifunction"),
                             "problem.bifunction", cfg.dim);
      p.b = parse_operator_b(require_field(problem, "problem", "operator_b"),
                             "problem.operator_b", cfg.dim);
      const json& sets = require_field(problem, "problem", "sets");
      if (!sets.is_array() || sets.empty()) {
        fail("problem.sets", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < sets.size(); ++i) {
        p.sets.push_back(parse_set(
            sets[i], "problem.sets[" + std::to_string(i) + "]", cfg.dim));
      }
      const double chi = p.b.lipschitz;
      if (!(epsilon > 0.0 && epsilon < 1.0 / (chi + 1.0))) {
        fail("problem.epsilon", "must lie in (0, 1/(chi+1)) = (0, " +
                                    std::to_string(1.0 / (chi + 1.0)) + ")");
      }

      EquilibriumSchedules s;
      s.gamma = parse_gamma(schedules, "schedules");
      check_gamma_bounds(s.gamma, epsilon, chi, "schedules.gamma");
      s.delta = parse_delta(schedules, "schedules");
      s.control = parse_index_control(
          require_field(problem, "problem", "index_control"),
          "problem.index_control", static_cast<int>(p.sets.size()), cfg.seed);
      if (problem.contains("weights")) {
        const std::string wtag =
            type_tag(problem.at("weights"), "problem.weights");
        if (wtag != "uniform") {
          fail("problem.weights.type", "unknown weight scheme '" + wtag + "'");
        }
      }
      s.weights = uniform_weights(s.control);
      if (1.0 / static_cast<double>(s.control.max_active) < epsilon) {
        fail("problem.index_control.max_active",
             "uniform weights 1/|I_n| would drop below epsilon");
      }
      const ErrorRule rule = parse_error_rule(schedules, "schedules");
      s.errors = rule.tag == "zero"
                     ? zero_equilibrium_errors(cfg.dim)
                     : summable_equilibrium_errors(
                           cfg.dim, rule.coeff, rule.power,
                           mix_seed(cfg.seed, "equilibrium-err"));
      if (schedules.contains("perturbation")) {
        const std::string ptag =
            type_tag(schedules.at("perturbation"), "schedules.perturbation");
        if (ptag == "seeded") {
          s.perturbation.enabled = true;
          s.perturbation.seed = mix_seed(cfg.seed, "delta-member");
        } else if (ptag != "none") {
          fail("schedules.perturbation.type", "unknown rule '" + ptag + "'");
        }
      }
      cfg.equilibrium_schedules = std::move(s);
      cfg.equilibrium = std::move(p);
      return cfg;
    }

    if (cfg.kind == "generic") {
      if (!(epsilon > 0.0 && epsilon < 1.0)) {
        fail("problem.epsilon", "must lie in (0, 1)");
      }
      ProblemSpec spec;
      spec.dim = cfg.dim;
      spec.epsilon = epsilon;

      const json& t_json = require_field(problem, "problem", "operator_t");
      const std::string t_tag = type_tag(t_json, "problem.operator_t");
      FirmOpHandle t;
      if (t_tag == "projection") {
        const ConvexSet set = parse_set(require_field(t_json,
                                                      "problem.operator_t",
                                                      "set"),
                                        "problem.operator_t.set", cfg.dim);
        t.apply = [set](const Vector& x) { return project(set, x); };
        t.name = "projection";
      } else if (t_tag == "resolvent_affine") {
        const Matrix m = parse_matrix(
            require_field(t_json, "problem.operator_t", "matrix"),
            "problem.operator_t.matrix", cfg.dim);
        Vector shift = Vector::Zero(cfg.dim);
        if (t_json.contains("shift")) {
          shift = require_vector_field(t_json, "problem.operator_t", "shift",
                                       cfg.dim);
        }
        const double gamma =
            require_number(t_json, "problem.operator_t", "gamma");
        if (!(gamma > 0.0)) fail("problem.operator_t.gamma", "must be > 0");
        t.apply = [m, shift, gamma](const Vector& x) {
          return resolvent_affine(m, shift, gamma, x);
        };
        t.name = "affine resolvent";
      } else if (t_tag == "prox_abs") {
        if (cfg.dim != 1) {
          fail("problem.operator_t", "prox_abs requires dim == 1");
        }
        const double gamma =
            require_number(t_json, "problem.operator_t", "gamma");
        if (!(gamma > 0.0)) fail("problem.operator_t.gamma", "must be > 0");
        t.apply = [gamma](const Vector& x) {
          Vector out(1);
          out[0] = prox_abs(gamma, x[0]);
          return out;
        };
        t.name = "prox |.|";
      } else if (t_tag == "identity") {
        t.apply = [](const Vector& x) { return x; };
        t.name = "identity";
      } else {
        fail("problem.operator_t.type", "unknown operator '" + t_tag + "'");
      }
      spec.t_schedule = [t](int) { return t; };

      const json& r_json = require_field(problem, "problem", "operator_r");
      const std::string r_tag = type_tag(r_json, "problem.operator_r");
      PseudoContractionHandle r;
      if (r_tag == "forward") {
        const MonotoneMap b =
            parse_operator_b(require_field(r_json, "problem.operator_r", "b"),
                             "problem.operator_r.b", cfg.dim);
        const double gamma =
            require_number(r_json, "problem.operator_r", "gamma");
        if (!(gamma > 0.0 && gamma * b.lipschitz <= 1.0 - epsilon)) {
          fail("problem.operator_r.gamma",
               "gamma * lipschitz must stay within (0, 1 - epsilon]");
        }
        r = forward_operator(b, gamma);
      } else if (r_tag == "identity") {
        r.apply = [](const Vector& x) { return x; };
        r.beta = std::min(1.0 - epsilon, 1e-9);
        r.domain = WholeSpace{cfg.dim};
        r.name = "identity";
      } else {
        fail("problem.operator_r.type", "unknown operator '" + r_tag + "'");
      }
      spec.r_schedule = [r](int) { return r; };

      const json& outer = require_field(problem, "problem", "outer");
      const std::string o_tag = type_tag(outer, "problem.outer");
      if (o_tag == "halfspace") {
        HalfSpace h{require_vector_field(outer, "problem.outer", "normal",
                                         cfg.dim),
                    require_number(outer, "problem.outer", "offset")};
        try {
          validate_set(ConvexSet{h});
        } catch (const std::exception& e) {
          fail("problem.outer", e.what());
        }
        spec.q_schedule = [h](int) { return fixed_halfspace_outer(h); };
      } else if (o_tag == "identity") {
        spec.q_schedule = [](int) { return identity_outer(); };
      } else {
        fail("problem.outer.type", "unknown outer step '" + o_tag + "'");
      }

      spec.constraint_s = WholeSpace{cfg.dim};
      if (problem.contains("constraint_set")) {
        spec.constraint_s = parse_set(problem.at("constraint_set"),
                                      "problem.constraint_set", cfg.dim);
      }

      double lambda_value = 1.0;
      if (schedules.contains("lambda")) {
        const json& l = schedules.at("lambda");
        if (type_tag(l, "schedules.lambda") != "constant") {
          fail("schedules.lambda.type", "unknown schedule");
        }
        lambda_value = require_number(l, "schedules.lambda", "value");
      }
      if (!(lambda_value >= epsilon && lambda_value <= 1.0)) {
        fail("schedules.lambda.value", "must lie in [epsilon, 1]");
      }
      cfg.lambda = constant_relaxation(lambda_value);

      const ErrorRule rule = parse_error_rule(schedules, "schedules");
      cfg.generic_errors =
          rule.tag == "zero"
              ? zero_errors(cfg.dim)
              : summable_errors(cfg.dim, rule.coeff, rule.power,
                                mix_seed(cfg.seed, "generic-err"));
      cfg.generic = std::move(spec);
      return cfg;
    }

    fail("problem.kind", "unknown kind '" + cfg.kind + "'");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(origin, 0) == 0) throw;
    throw ConfigError(origin + ": " + msg);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

namespace {

void write_cli_trace(const IterateTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open trace output");
  out << "n,residual,outer_gap,error_bound,dist_to_ref,feasibility_max\n";
  char buf[320];
  for (const auto& rec : trace.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  rec.n, rec.residual, rec.outer_gap, rec.error_bound,
                  rec.dist_to_ref, rec.feasibility);
    out << buf;
  }
}

}  // namespace

RunSummary run_from_config(const LoadedConfig& config,
                           const std::string& output_override) {
  RunSummary summary;
  summary.trace_path =
      output_override.empty() ? config.output : output_override;
  if (summary.trace_path.empty()) {
    throw ConfigError("output: missing trace path");
  }

  if (config.inclusion) {
    InclusionOptions options;
    options.reference = config.reference;
    const InclusionResult result =
        solve_inclusion(*config.inclusion, config.gamma,
                        config.inclusion_errors, config.x0, config.stop,
                        options);
    summary.status = result.status;
    summary.iterations = result.iterations;
    summary.final_residual = result.final_residual;
    summary.final_feasibility = result.final_feasibility;
    summary.solution = result.solution;
    if (!result.trace.records.empty()) {
      summary.final_outer_gap = result.trace.records.back().outer_gap;
    }
    summary.trace_rows = static_cast<int>(result.trace.records.size());
    write_cli_trace(result.trace, summary.trace_path);
    return summary;
  }

  if (config.equilibrium) {
    EquilibriumOptions options;
    options.reference = config.reference;
    const EquilibriumResult result =
        solve_equilibrium(*config.equilibrium, config.equilibrium_schedules,
                          config.x0, config.stop, options);
    summary.status = result.status;
    summary.iterations = result.iterations;
    summary.final_residual = result.final_residual;
    summary.final_feasibility = result.final_feasibility;
    summary.solution = result.solution;
    if (!result.trace.records.empty()) {
      summary.final_outer_gap = result.trace.records.back().outer_gap;
    }
    summary.trace_rows = static_cast<int>(result.trace.records.size());
    write_cli_trace(result.trace, summary.trace_path);
    return summary;
  }

  if (config.generic) {
    EngineOptions options;
    options.reference = config.reference;
    const RunResult result =
        engine_run(*config.generic, config.generic_errors, config.lambda,
                   config.x0, config.stop, options);
    summary.status = result.status;
    summary.iterations = result.iterations;
    summary.solution = result.final_x;
    summary.stop_reason = result.stop_reason;
    if (!result.trace.records.empty()) {
      const auto& last = result.trace.records.back();
      summary.final_residual = last.residual;
      summary.final_outer_gap = last.outer_gap;
      summary.final_feasibility = last.feasibility;
    }
    summary.trace_rows = static_cast<int>(result.trace.records.size());
    write_cli_trace(result.trace, summary.trace_path);
    return summary;
  }

  throw ConfigError("problem: no runnable problem in config");
}

VerificationReport verify_from_config(const LoadedConfig& config) {
  constexpr int kSamples = 1000;
  VerificationReport all;
  auto absorb = [&all](VerificationReport r) {
    for (auto& c : r.checks) all.checks.push_back(std::move(c));
  };

  if (config.inclusion) {
    const InclusionProblem& p = *config.inclusion;
    const double gamma0 = config.gamma.gamma(0);
    absorb(verify_resolvent(p.a, gamma0, kSamples,
                            mix_seed(config.seed, "verify-a")));
    absorb(verify_monotone_map(p.b, kSamples,
                               mix_seed(config.seed, "verify-b")));
    absorb(verify_pseudocontraction(forward_operator(p.b, gamma0), kSamples,
                                    mix_seed(config.seed, "verify-r")));
    absorb(verify_constraints(p.constraints, p.dim, kSamples,
                              mix_seed(config.seed, "verify-f")));
    return all;
  }

  if (config.equilibrium) {
    const EquilibriumProblem& p = *config.equilibrium;
    const double gamma0 = config.equilibrium_schedules.gamma.gamma(0);
    absorb(verify_bifunction(p.f, kSamples,
                             mix_seed(config.seed, "verify-bif")));
    FirmOpHandle t;
    t.apply = [&p, gamma0](const Vector& x) {
      return p.f.exact_resolvent(gamma0, x);
    };
    t.name = "J_{gamma F}";
    absorb(verify_firmly_nonexpansive(t, kSamples,
                                      mix_seed(config.seed, "verify-jf"),
                                      WholeSpace{p.dim}));
    absorb(verify_monotone_map(p.b, kSamples,
                               mix_seed(config.seed, "verify-b")));
    absorb(verify_pseudocontraction(forward_operator(p.b, gamma0), kSamples,
                                    mix_seed(config.seed, "verify-r")));
    return all;
  }

  if (config.generic) {
    const ProblemSpec& spec = *config.generic;
    absorb(verify_firmly_nonexpansive(spec.t_schedule(0), kSamples,
                                      mix_seed(config.seed, "verify-t"),
                                      WholeSpace{spec.dim}));
    absorb(verify_pseudocontraction(spec.r_schedule(0), kSamples,
                                    mix_seed(config.seed, "verify-r")));
    return all;
  }

  throw ConfigError("problem: no verifiable problem in config");
}

std::optional<IndexControlReport> audit_index_control_from_config(
    const LoadedConfig& config) {
  if (!config.equilibrium) return std::nullopt;
  const IndexControl& ctrl = config.equilibrium_schedules.control;
  const int max_window =
      *std::max_element(ctrl.window.begin(), ctrl.window.end());
  return validate_index_control(ctrl, 10 * max_window);
}

std::string trace_format_text() {
  return
      "Trace file format: comma-separated values, one header row, then one\n"
      "row per completed iteration.\n"
      "\n"
      "  n               iteration counter, starting at 0\n"
      "  residual        ||q_n - x_n||, the fixed-point residual proxy\n"
      "  outer_gap       ||z_n - Q_n z_n||, distance moved by the outer step\n"
      "  error_bound     3||a_n|| + 2||b_n|| + ||c_n||, the summable bound\n"
      "                  on the injected error aggregate\n"
      "  dist_to_ref     ||x_n - x_ref|| when the config supplies a\n"
      "                  reference solution, nan otherwise\n"
      "  feasibility_max worst constraint violation at x_{n+1}: max_i\n"
      "                  max(0, f_i) for inclusion runs, max_i dist(., S_i)\n"
      "                  for equilibrium runs, distance to the constraint\n"
      "                  set for generic runs (nan when unset)\n"
      "\n"
      "Numbers are printed with %.17g, so identical configs and seeds\n"
      "reproduce byte-identical files.\n";
}

}  // namespace opsplit
