#pragma once

#include "opsplit/vector_space.hpp"

#include <cstdint>
#include <functional>
#include <string>

// Independent brute-force and direct solvers producing ground-truth
// solutions and certificates for desk-scale instances. These are deliberately
// separate code paths from the iterative solvers (they share only
// vector_space) so that acceptance tests cross-check, not echo, the
// implementation.

namespace opsplit {

struct Bifunction;
struct MonotoneMap;

struct OracleSolution {
  Vector point;
  double certificate = 0.0;  // KKT residual or final grid gap
  std::string method;
};

/// Minimizes the natural-residual gap ||x - P_C(x - map(x))|| over a uniform
/// grid of `resolution` points per axis on C (d <= 3, C bounded), then
/// refines around the best point by repeated local bisection.
OracleSolution solve_vi_grid(const ConvexSet& c,
                             const std::function<Vector(const Vector&)>& map,
                             int resolution);

/// Default grid resolution: 401 per axis for d <= 2, 101 for d = 3.
int default_grid_resolution(Eigen::Index dim);

/// Solves 0 in Mx + u + N_box(x) for monotone M (d <= 4) by enumerating the
/// 3^d active-set patterns of the box and solving each reduced linear
/// system; returns the pattern satisfying complementarity within 1e-10.
/// Throws when no pattern is feasible (empty solution set).
OracleSolution solve_affine_kkt(const Matrix& m, const Vector& u,
                                const Box& box);

/// max over sampled y in C of -(F(x, y) + <Bx, y - x>); a solution yields a
/// value <= tolerance, and negative values certify strict interior optima.
/// Unbounded C is sampled over a cube of the given halfwidth.
double equilibrium_gap(const Bifunction& f, const MonotoneMap& b,
                       const Vector& x, int sample_count, std::uint64_t seed,
                       double halfwidth = 10.0);

}  // namespace opsplit
