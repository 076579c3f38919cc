#pragma once

#include "opsplit/vector_space.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Concrete operators and certificates: resolvents of maximally monotone
// operators, prox maps, monotone Lipschitz maps, pseudo contractions, and
// sampling-based verification of their defining inequalities. Operators are
// immutable handles over pure functions; validity is certified by seeded
// random sampling, which gives reproducible falsification power at desk
// scale.

namespace opsplit {

using VectorFn = std::function<Vector(const Vector&)>;

/// Single-valued monotone map with a Lipschitz certificate chi.
struct MonotoneMap {
  VectorFn apply;
  double lipschitz = 1.0;  // chi > 0, certified by sampling
  ConvexSet domain;
  std::string name = "B";
};

/// Set-valued monotone operator A accessed only through its resolvent
/// J_{gamma A}; never through graph enumeration.
struct ResolventOracle {
  std::function<Vector(double gamma, const Vector&)> resolve;
  ConvexSet domain_a;
  std::string name = "A";
};

/// R with Id - R monotone and beta-Lipschitz, beta in (0, 1].
struct PseudoContractionHandle {
  VectorFn apply;
  double beta = 1.0;
  ConvexSet domain;
  std::string name = "R";
};

/// T with <x - y, Tx - Ty> >= ||Tx - Ty||^2.
struct FirmOpHandle {
  VectorFn apply;
  std::string name = "T";
};

// ---------------------------------------------------------------------------
// Concrete operators
// ---------------------------------------------------------------------------

/// Resolvent of A: x -> Mx + u with M monotone (PSD or skew): the unique q
/// with (I + gamma*M) q = x - gamma*u. Throws when the linear system is
/// singular beyond tolerance (signals a non-monotone M) or the solve residual
/// exceeds 1e-10.
Vector resolvent_affine(const Matrix& m, const Vector& u, double gamma,
                        const Vector& x);

/// Resolvent of the normal cone of a projectable set: the projector,
/// independent of gamma (gamma > 0 still required).
Vector resolvent_normal_cone(const ConvexSet& set, double gamma,
                             const Vector& x);

/// Soft threshold, the resolvent of the subdifferential of |.| in 1-d.
double prox_abs(double gamma, double x);

/// Oracle wrapping resolvent_affine for a fixed (M, u).
ResolventOracle make_affine_resolvent(Matrix m, Vector u);

/// Oracle wrapping resolvent_normal_cone for a fixed set.
ResolventOracle make_normal_cone_resolvent(ConvexSet set);

/// Id - gamma*B as a pseudo contraction with beta = gamma * B.lipschitz.
/// Throws when gamma * B.lipschitz > 1.
PseudoContractionHandle forward_operator(const MonotoneMap& b, double gamma);

// ---------------------------------------------------------------------------
// Sampling certificates
// ---------------------------------------------------------------------------

/// One sampled inequality: pass iff worst_margin >= -tolerance.
struct CertificateReport {
  std::string check;
  std::string subject;
  bool pass = false;
  double worst_margin = 0.0;
  int worst_sample = -1;
  int samples = 0;
  double tolerance = 0.0;
};

struct VerificationReport {
  std::vector<CertificateReport> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Checks <x-y, Tx-Ty> >= ||Tx-Ty||^2 on seeded pairs drawn from the given
/// sampling region. Failure is a report outcome, not an error.
VerificationReport verify_firmly_nonexpansive(
    const FirmOpHandle& t, int samples, std::uint64_t seed,
    const ConvexSet& region = WholeSpace{2});

/// Checks the pseudo-contraction inequality
/// ||Rx-Ry||^2 <= ||x-y||^2 + ||(Id-R)x-(Id-R)y||^2 and the beta-Lipschitz
/// certificate of Id-R on seeded pairs within R.domain.
VerificationReport verify_pseudocontraction(const PseudoContractionHandle& r,
                                            int samples, std::uint64_t seed);

/// Checks the chi-Lipschitz certificate and monotonicity of B on seeded
/// pairs within B.domain.
VerificationReport verify_monotone_map(const MonotoneMap& b, int samples,
                                       std::uint64_t seed);

/// Checks firm nonexpansiveness of resolve(gamma, .) on seeded pairs.
VerificationReport verify_resolvent(const ResolventOracle& a, double gamma,
                                    int samples, std::uint64_t seed);

// Handy building blocks for tests and configs.
MonotoneMap make_linear_map(Matrix m, Vector shift, ConvexSet domain,
                            double lipschitz);
MonotoneMap make_identity_map(Eigen::Index dim);
MonotoneMap make_zero_map(Eigen::Index dim, double lipschitz = 1e-9);

}  // namespace opsplit
