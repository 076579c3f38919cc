#include "opsplit/operators.hpp"

#include "opsplit/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace opsplit {

Vector resolvent_affine(const Matrix& m, const Vector& u, double gamma,
                        const Vector& x) {
  const Eigen::Index d = x.size();
  if (m.rows() != d || m.cols() != d || u.size() != d) {
    throw std::invalid_argument("resolvent_affine: dimension mismatch");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("resolvent_affine: gamma must be > 0");
  }
  const Matrix system = Matrix::Identity(d, d) + gamma * m;
  const Vector rhs = x - gamma * u;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "resolvent_affine: I + gamma*M is singular (M is not monotone)");
  }
  const Vector q = lu.solve(rhs);
  if ((system * q - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm())) {
    throw std::runtime_error("resolvent_affine: solve residual above 1e-10");
  }
  return q;
}

Vector resolvent_normal_cone(const ConvexSet& set, double gamma,
                             const Vector& x) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("resolvent_normal_cone: gamma must be > 0");
  }
  return project(set, x);
}

double prox_abs(double gamma, double x) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("prox_abs: gamma must be > 0");
  }
  const double shrunk = std::abs(x) - gamma;
  if (shrunk <= 0.0) return 0.0;
  return x < 0.0 ? -shrunk : shrunk;
}

ResolventOracle make_affine_resolvent(Matrix m, Vector u) {
  const Eigen::Index d = u.size();
  ResolventOracle oracle;
  oracle.resolve = [m = std::move(m), u = std::move(u)](double gamma,
                                                        const Vector& x) {
    return resolvent_affine(m, u, gamma, x);
  };
  oracle.domain_a = WholeSpace{d};
  oracle.name = "affine resolvent";
  return oracle;
}

ResolventOracle make_normal_cone_resolvent(ConvexSet set) {
  validate_set(set);
  ResolventOracle oracle;
  oracle.domain_a = set;
  oracle.resolve = [set = std::move(set)](double gamma, const Vector& x) {
    return resolvent_normal_cone(set, gamma, x);
  };
  oracle.name = "normal cone resolvent";
  return oracle;
}

PseudoContractionHandle forward_operator(const MonotoneMap& b, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("forward_operator: gamma must be > 0");
  }
  const double beta = gamma * b.lipschitz;
  if (beta > 1.0) {
    throw std::invalid_argument(
        "forward_operator: gamma * lipschitz = " + std::to_string(beta) +
        " exceeds 1");
  }
  PseudoContractionHandle r;
  r.apply = [apply = b.apply, gamma](const Vector& x) {
    return Vector(x - gamma * apply(x));
  };
  r.beta = beta;
  r.domain = b.domain;
  r.name = "Id - " + std::to_string(gamma) + "*" + b.name;
  return r;
}

namespace {

struct PairSampler {
  std::mt19937_64 rng;
  const ConvexSet& region;

  std::pair<Vector, Vector> next() {
    Vector x = sample_in_set(rng, region);
    Vector y = sample_in_set(rng, region);
    return {std::move(x), std::move(y)};
  }
};

CertificateReport run_pair_check(
    const std::string& check, const std::string& subject, int samples,
    std::uint64_t seed, const ConvexSet& region, double tolerance,
    const std::function<double(const Vector&, const Vector&)>& margin) {
  if (samples < 1) {
    throw std::invalid_argument("verification: samples must be >= 1");
  }
  CertificateReport report;
  report.check = check;
  report.subject = subject;
  report.samples = samples;
  report.tolerance = tolerance;
  report.worst_margin = std::numeric_limits<double>::infinity();
  PairSampler sampler{make_rng(seed, check), region};
  for (int k = 0; k < samples; ++k) {
    const auto [x, y] = sampler.next();
    const double m = margin(x, y);
    if (m < report.worst_margin) {
      report.worst_margin = m;
      report.worst_sample = k;
    }
  }
  report.pass = report.worst_margin >= -tolerance;
  return report;
}

}  // namespace

VerificationReport verify_firmly_nonexpansive(const FirmOpHandle& t,
                                              int samples, std::uint64_t seed,
                                              const ConvexSet& region) {
  VerificationReport report;
  report.checks.push_back(run_pair_check(
      "firmly-nonexpansive", t.name, samples, seed, region, 1e-9,
      [&](const Vector& x, const Vector& y) {
        const Vector tx = t.apply(x);
        const Vector ty = t.apply(y);
        return (x - y).dot(tx - ty) - (tx - ty).squaredNorm();
      }));
  return report;
}

VerificationReport verify_pseudocontraction(const PseudoContractionHandle& r,
                                            int samples, std::uint64_t seed) {
  VerificationReport report;
  report.checks.push_back(run_pair_check(
      "pseudo-contraction", r.name, samples, seed, r.domain, 1e-9,
      [&](const Vector& x, const Vector& y) {
        const Vector rx = r.apply(x);
        const Vector ry = r.apply(y);
        return (x - y).squaredNorm() + ((x - rx) - (y - ry)).squaredNorm() -
               (rx - ry).squaredNorm();
      }));
  report.checks.push_back(run_pair_check(
      "complement-lipschitz", r.name, samples, seed + 1, r.domain, 1e-9,
      [&](const Vector& x, const Vector& y) {
        const Vector rx = r.apply(x);
        const Vector ry = r.apply(y);
        return r.beta * (x - y).norm() - ((x - rx) - (y - ry)).norm();
      }));
  return report;
}

VerificationReport verify_monotone_map(const MonotoneMap& b, int samples,
                                       std::uint64_t seed) {
  VerificationReport report;
  report.checks.push_back(run_pair_check(
      "lipschitz", b.name, samples, seed, b.domain, 1e-9,
      [&](const Vector& x, const Vector& y) {
        return b.lipschitz * (x - y).norm() - (b.apply(x) - b.apply(y)).norm();
      }));
  report.checks.push_back(run_pair_check(
      "monotone", b.name, samples, seed + 1, b.domain, 1e-10,
      [&](const Vector& x, const Vector& y) {
        return (b.apply(x) - b.apply(y)).dot(x - y);
      }));
  return report;
}

VerificationReport verify_resolvent(const ResolventOracle& a, double gamma,
                                    int samples, std::uint64_t seed) {
  FirmOpHandle t;
  t.apply = [&a, gamma](const Vector& x) { return a.resolve(gamma, x); };
  t.name = a.name;
  return verify_firmly_nonexpansive(t, samples, seed,
                                    WholeSpace{dim_of(a.domain_a)});
}

MonotoneMap make_linear_map(Matrix m, Vector shift, ConvexSet domain,
                            double lipschitz) {
  if (m.rows() != shift.size() || m.cols() != shift.size()) {
    throw std::invalid_argument("make_linear_map: dimension mismatch");
  }
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("make_linear_map: lipschitz must be > 0");
  }
  MonotoneMap b;
  b.apply = [m = std::move(m), shift = std::move(shift)](const Vector& x) {
    return Vector(m * x + shift);
  };
  b.lipschitz = lipschitz;
  b.domain = std::move(domain);
  b.name = "linear map";
  return b;
}

MonotoneMap make_identity_map(Eigen::Index dim) {
  MonotoneMap b;
  b.apply = [](const Vector& x) { return x; };
  b.lipschitz = 1.0;
  b.domain = WholeSpace{dim};
  b.name = "identity map";
  return b;
}

MonotoneMap make_zero_map(Eigen::Index dim, double lipschitz) {
  MonotoneMap b;
  b.apply = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  b.lipschitz = lipschitz;
  b.domain = WholeSpace{dim};
  b.name = "zero map";
  return b;
}

}  // namespace opsplit
