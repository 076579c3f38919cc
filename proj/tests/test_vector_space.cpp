#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opsplit/random.hpp"
#include "opsplit/vector_space.hpp"

#include <cmath>
#include <vector>

using namespace opsplit;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Uniform grid over a box, used as the independent minimality oracle for the
// projection operators.
std::vector<Vector> grid_points(const Box& box, int per_axis) {
  const Eigen::Index d = box.lower.size();
  std::vector<Vector> points;
  const long total = static_cast<long>(std::pow(per_axis, d));
  Vector p(d);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (Eigen::Index k = 0; k < d; ++k) {
      const int j = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      p[k] = box.lower[k] +
             (box.upper[k] - box.lower[k]) * j / double(per_axis - 1);
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace

TEST_CASE("inner product basics") {
  CHECK(inner(vec2(1, 2), vec2(3, 4)) == doctest::Approx(11.0));
  CHECK(inner(vec2(1, 0), vec2(0, 1)) == 0.0);

  Vector a(3);
  a << 1, 2, 3;
  CHECK_THROWS_AS(inner(a, vec2(1, 2)), std::invalid_argument);

  auto rng = make_rng(101, "inner");
  for (int k = 0; k < 200; ++k) {
    const Vector x = sample_cube(rng, 3, 5.0);
    CHECK(inner(x, x) == doctest::Approx(norm(x) * norm(x)).epsilon(1e-12));
  }
}

TEST_CASE("cauchy-schwarz on random pairs") {
  auto rng = make_rng(7, "cs");
  for (int k = 0; k < 500; ++k) {
    const Vector a = sample_cube(rng, 4, 10.0);
    const Vector b = sample_cube(rng, 4, 10.0);
    CHECK(std::abs(inner(a, b)) <= norm(a) * norm(b) + 1e-12);
  }
}

TEST_CASE("halfspace projection") {
  const HalfSpace h{vec2(1, 0), 0.0};
  CHECK((project_halfspace(h, vec2(2, 3)) - vec2(0, 3)).norm() == 0.0);
  // feasible points are untouched
  CHECK((project_halfspace(h, vec2(-1, 5)) - vec2(-1, 5)).norm() == 0.0);

  CHECK_THROWS_AS(project_halfspace(HalfSpace{vec2(0, 0), 1.0}, vec2(1, 1)),
                  std::invalid_argument);

  // Variational characterization: <x - Px, w - Px> <= 0 for feasible w.
  auto rng = make_rng(11, "hs");
  for (int k = 0; k < 50; ++k) {
    Vector normal = unit_direction(rng, 2) * 3.0;
    const HalfSpace hs{normal, sample_cube(rng, 1, 2.0)[0]};
    const Vector x = sample_cube(rng, 2, 8.0);
    const Vector y = project_halfspace(hs, x);
    CHECK(inner(hs.normal, y) <= hs.offset + 1e-12);
    for (const Vector& raw : grid_points(Box{vec2(-9, -9), vec2(9, 9)}, 7)) {
      const Vector w = project_halfspace(hs, raw);
      CHECK(inner(x - y, w - y) <= 1e-10);
    }
  }
}

TEST_CASE("box projection clamps and is grid-minimal") {
  const Box box{vec2(-1, -1), vec2(1, 1)};
  CHECK((project_box(box, vec2(2, 0.5)) - vec2(1, 0.5)).norm() == 0.0);
  CHECK((project_box(box, vec2(0.3, -0.7)) - vec2(0.3, -0.7)).norm() == 0.0);

  auto rng = make_rng(13, "box");
  const auto grid = grid_points(box, 21);
  for (int k = 0; k < 100; ++k) {
    const Vector x = sample_cube(rng, 2, 5.0);
    const Vector p = project_box(box, x);
    for (const Vector& w : grid) {
      CHECK((x - p).norm() <= (x - w).norm() + 1e-12);
    }
  }
}

TEST_CASE("ball projection scales radially and is grid-minimal") {
  const Ball ball{vec2(0, 0), 1.0};
  CHECK((project_ball(ball, vec2(2, 0)) - vec2(1, 0)).norm() < 1e-15);
  CHECK((project_ball(ball, vec2(0.1, 0.1)) - vec2(0.1, 0.1)).norm() == 0.0);

  auto rng = make_rng(17, "ball");
  for (int k = 0; k < 100; ++k) {
    const Vector x = sample_cube(rng, 2, 4.0);
    const Vector p = project_ball(ball, x);
    for (const Vector& raw : grid_points(Box{vec2(-1, -1), vec2(1, 1)}, 21)) {
      if ((raw - ball.center).norm() > ball.radius) continue;
      CHECK((x - p).norm() <= (x - raw).norm() + 1e-12);
    }
  }
}

TEST_CASE("projections are firmly nonexpansive and idempotent") {
  auto rng = make_rng(23, "proj-prop");
  const std::vector<ConvexSet> sets{
      Box{vec2(-1, -0.5), vec2(2, 1)},
      Ball{vec2(0.5, -0.25), 1.5},
      HalfSpace{vec2(1, 2), 0.75},
  };
  for (const auto& set : sets) {
    for (int k = 0; k < 300; ++k) {
      const Vector x = sample_cube(rng, 2, 6.0);
      const Vector y = sample_cube(rng, 2, 6.0);
      const Vector px = project(set, x);
      const Vector py = project(set, y);
      CHECK(inner(x - y, px - py) >= (px - py).squaredNorm() - 1e-10);
      CHECK((project(set, px) - px).norm() <= 1e-12);
    }
  }
}

TEST_CASE("sampling lands inside the target set") {
  auto rng = make_rng(41, "sampling");
  const ConvexSet box{Box{vec2(-1, 0), vec2(2, 1)}};
  const ConvexSet ball{Ball{vec2(0.5, 0.5), 0.75}};
  for (int k = 0; k < 200; ++k) {
    CHECK(contains(box, sample_in_set(rng, box)));
    CHECK(contains(ball, sample_in_set(rng, ball), 1e-9));
  }
  // intersections are sampled by cyclic projection; approximate near edges
  Intersection inter;
  inter.members.push_back(Box{vec2(-1, -1), vec2(1, 1)});
  inter.members.push_back(HalfSpace{vec2(1, 1), 0.5});
  const ConvexSet both{inter};
  for (int k = 0; k < 200; ++k) {
    CHECK(contains(both, sample_in_set(rng, both), 0.05));
  }
}

TEST_CASE("set membership and validation") {
  const Box box{vec2(-1, -1), vec2(1, 1)};
  CHECK(contains(ConvexSet{box}, vec2(1, 1)));
  CHECK(contains(ConvexSet{box}, vec2(1.0 + 5e-13, 0)));  // boundary slack
  CHECK_FALSE(contains(ConvexSet{box}, vec2(1.1, 0)));

  Intersection inter;
  inter.members.push_back(box);
  inter.members.push_back(HalfSpace{vec2(1, 1), 0.0});
  CHECK(contains(ConvexSet{inter}, vec2(-0.5, 0.2)));
  CHECK_FALSE(contains(ConvexSet{inter}, vec2(0.5, 0.9)));
  CHECK_THROWS_AS(project(ConvexSet{inter}, vec2(0, 0)),
                  std::invalid_argument);

  CHECK_THROWS_AS(validate_set(ConvexSet{Box{vec2(1, 0), vec2(0, 1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_set(ConvexSet{Ball{vec2(0, 0), -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_set(ConvexSet{HalfSpace{vec2(0, 0), 1.0}}),
                  std::invalid_argument);
}
