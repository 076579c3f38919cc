#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <variant>
#include <vector>

// Finite-dimensional Hilbert space primitives: vectors over R^d with the
// Euclidean inner product, and closed-form projections onto the canonical
// convex sets (boxes, balls, half-spaces) that every solver in this library
// builds on.

namespace opsplit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean inner product. Throws on dimension mismatch.
double inner(const Vector& a, const Vector& b);

/// Euclidean norm.
double norm(const Vector& x);

/// True iff every coordinate is finite (no NaN/Inf).
bool all_finite(const Vector& x);

/// Throws std::invalid_argument unless x is finite and has dimension dim.
void require_vector(const Vector& x, Eigen::Index dim, const char* what);

// ---------------------------------------------------------------------------
// Canonical convex sets
// ---------------------------------------------------------------------------

/// {x : <normal, x> <= offset}, normal != 0.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;
};

/// Componentwise bounds, lower_i <= upper_i.
struct Box {
  Vector lower;
  Vector upper;
};

/// Closed Euclidean ball, radius > 0.
struct Ball {
  Vector center;
  double radius = 1.0;
};

/// All of R^d.
struct WholeSpace {
  Eigen::Index dim = 0;
};

using BasicSet = std::variant<WholeSpace, Box, Ball, HalfSpace>;

/// Finite intersection of canonical sets. Membership tests only; no
/// closed-form projection is provided for intersections.
struct Intersection {
  std::vector<BasicSet> members;
};

using ConvexSet = std::variant<WholeSpace, Box, Ball, HalfSpace, Intersection>;

Eigen::Index dim_of(const ConvexSet& set);

/// Throws std::invalid_argument when a set invariant is violated
/// (zero normal, lower > upper, radius <= 0, empty/mismatched intersection).
void validate_set(const ConvexSet& set);

/// Closed sets: boundary points count as inside. tol is absolute.
bool contains(const ConvexSet& set, const Vector& x, double tol = 1e-12);

/// Metric projection. Throws for Intersection (no closed form).
Vector project(const ConvexSet& set, const Vector& x);

/// ||x - P(x)|| for projectable sets; for an intersection, the maximum of the
/// member distances (a lower bound on the true distance, used for feasibility
/// reporting only).
double feasibility_distance(const ConvexSet& set, const Vector& x);

// ---------------------------------------------------------------------------
// Projection operators
// ---------------------------------------------------------------------------

/// Projection onto {x : <normal,x> <= offset}. Identity on feasible points,
/// otherwise x - ((<normal,x> - offset)/||normal||^2) * normal.
Vector project_halfspace(const HalfSpace& h, const Vector& x);

/// Componentwise clamp onto [lower, upper].
Vector project_box(const Box& b, const Vector& x);

/// Identity inside the ball, radial scaling onto the sphere outside.
Vector project_ball(const Ball& b, const Vector& x);

}  // namespace opsplit
