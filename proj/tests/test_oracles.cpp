#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opsplit/equilibrium.hpp"
#include "opsplit/operators.hpp"
#include "opsplit/oracles.hpp"

#include <cmath>

using namespace opsplit;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Box box2(double lo, double hi) { return Box{vec2(lo, lo), vec2(hi, hi)}; }

}  // namespace

TEST_CASE("vi grid oracle on analytic instances") {
  // C = [-1,1], map = id: the unique solution is 0
  const Box seg{vec1(-1), vec1(1)};
  const auto sol = solve_vi_grid(
      ConvexSet{seg}, [](const Vector& x) { return x; }, 401);
  CHECK(std::abs(sol.point[0]) < 1e-8);
  CHECK(sol.certificate <= 1e-6);

  // C = [0,1]^2, map = x - (1,1): solution pinned at the corner (1,1)
  const auto corner = solve_vi_grid(
      ConvexSet{Box{vec2(0, 0), vec2(1, 1)}},
      [](const Vector& x) { return Vector(x - vec2(1, 1)); }, 401);
  CHECK((corner.point - vec2(1, 1)).norm() < 1e-8);

  // a map with a known interior zero
  const Vector target = vec2(0.25, -0.5);
  const auto interior = solve_vi_grid(
      ConvexSet{box2(-1, 1)},
      [target](const Vector& x) { return Vector(x - target); }, 101);
  CHECK((interior.point - target).norm() < 1e-8);
  CHECK(interior.certificate <= 1e-8);
}

TEST_CASE("vi grid handles ball feasible sets via the bounding box") {
  const Vector target = vec2(0.3, 0.2);
  const auto sol = solve_vi_grid(
      ConvexSet{Ball{vec2(0, 0), 1.0}},
      [target](const Vector& x) { return Vector(x - target); }, 201);
  CHECK((sol.point - target).norm() < 1e-7);

  // interior optimum pushed outside the ball: solution on the sphere
  const Vector outside = vec2(3.0, 0.0);
  const auto rim = solve_vi_grid(
      ConvexSet{Ball{vec2(0, 0), 1.0}},
      [outside](const Vector& x) { return Vector(x - outside); }, 201);
  CHECK((rim.point - vec2(1, 0)).norm() < 1e-6);
}

TEST_CASE("equilibrium gap requires a feasible evaluation point") {
  const Bifunction f = make_dc_quadratic_bifunction(
      1.0, Vector::Zero(1), Vector::Zero(1),
      ConvexSet{Box{vec1(-1), vec1(1)}});
  const MonotoneMap b = make_identity_map(1);
  CHECK_THROWS_AS(equilibrium_gap(f, b, vec1(5.0), 100, 1),
                  std::invalid_argument);
}

TEST_CASE("vi grid rejects unbounded feasible sets and d > 3") {
  CHECK_THROWS_AS(solve_vi_grid(
                      ConvexSet{WholeSpace{2}},
                      [](const Vector& x) { return x; }, 11),
                  std::invalid_argument);
  Box big;
  big.lower = Vector::Constant(4, -1.0);
  big.upper = Vector::Constant(4, 1.0);
  CHECK_THROWS_AS(solve_vi_grid(
                      ConvexSet{big}, [](const Vector& x) { return x; }, 11),
                  std::invalid_argument);
}

TEST_CASE("kkt oracle by active-set enumeration") {
  // d=1: M=1, u=0 on [-1,1] -> 0
  const auto mid = solve_affine_kkt(Matrix::Identity(1, 1), vec1(0),
                                    Box{vec1(-1), vec1(1)});
  CHECK(mid.point[0] == 0.0);
  CHECK(mid.certificate <= 1e-10);

  // d=2 skew: vanishes only at the origin inside the box
  Matrix skew(2, 2);
  skew << 0, -1, 1, 0;
  const auto origin = solve_affine_kkt(skew, vec2(0, 0), box2(-1, 1));
  CHECK(origin.point.norm() == 0.0);

  // u pushes the solution onto the upper face with a sign-correct multiplier
  const auto face =
      solve_affine_kkt(Matrix::Identity(2, 2), vec2(-2, 0), box2(-1, 1));
  CHECK((face.point - vec2(1, 0)).norm() < 1e-12);
}

TEST_CASE("kkt oracle skips singular free patterns") {
  // M = 0 makes every free block singular; the sweep falls through to the
  // face patterns and lands on the lower bound.
  const auto sol = solve_affine_kkt(Matrix::Zero(2, 2), vec2(0.5, 0.5),
                                    box2(-1, 1));
  CHECK((sol.point - vec2(-1, -1)).norm() == 0.0);

  CHECK_THROWS_AS(solve_affine_kkt(Matrix::Identity(2, 2), vec1(0),
                                   box2(-1, 1)),
                  std::invalid_argument);
}

TEST_CASE("grid and kkt oracles agree on shared instances") {
  Matrix m(2, 2);
  m << 2.0, 0.3, -0.3, 1.0;  // PSD symmetric part + skew
  const Vector u = vec2(-1.0, 0.5);
  const Box box = box2(-1, 1);

  const auto kkt = solve_affine_kkt(m, u, box);
  const auto grid = solve_vi_grid(
      ConvexSet{box}, [&](const Vector& x) { return Vector(m * x + u); }, 401);
  const double spacing = 2.0 / 400.0;
  CHECK((kkt.point - grid.point).norm() <= 2.0 * spacing);
}

TEST_CASE("default grid resolutions") {
  CHECK(default_grid_resolution(1) == 401);
  CHECK(default_grid_resolution(2) == 401);
  CHECK(default_grid_resolution(3) == 101);
}

TEST_CASE("equilibrium gap certifies solutions and rejects non-solutions") {
  // F(x,y) = g(y) - g(x) with g = 0.5||.||^2 on C = R^1, B = id.
  const Bifunction f = make_dc_quadratic_bifunction(
      1.0, Vector::Zero(1), Vector::Zero(1), WholeSpace{1});
  const MonotoneMap b = make_identity_map(1);

  CHECK(equilibrium_gap(f, b, vec1(0.0), 10000, 99) <= 1e-8);
  CHECK(equilibrium_gap(f, b, vec1(1.0), 10000, 99) > 0.1);

  // B = 0: the gap is <= 0 exactly at minimizers of g over C
  const MonotoneMap zero = make_zero_map(1);
  CHECK(equilibrium_gap(f, zero, vec1(0.0), 10000, 99) <= 0.0);
  CHECK(equilibrium_gap(f, zero, vec1(0.5), 10000, 99) > 0.0);
}
