#include "opsplit/oracles.hpp"

#include "opsplit/equilibrium.hpp"
#include "opsplit/operators.hpp"
#include "opsplit/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace opsplit {

namespace {

Box bounding_box(const ConvexSet& c) {
  if (const auto* box = std::get_if<Box>(&c)) return *box;
  if (const auto* ball = std::get_if<Ball>(&c)) {
    const Eigen::Index d = ball->center.size();
    Box out;
    out.lower = ball->center - Vector::Constant(d, ball->radius);
    out.upper = ball->center + Vector::Constant(d, ball->radius);
    return out;
  }
  throw std::invalid_argument("solve_vi_grid: C must be a bounded box or ball");
}

}  // namespace

int default_grid_resolution(Eigen::Index dim) { return dim <= 2 ? 401 : 101; }

OracleSolution solve_vi_grid(const ConvexSet& c,
                             const std::function<Vector(const Vector&)>& map,
                             int resolution) {
  const Eigen::Index d = dim_of(c);
  if (d > 3) throw std::invalid_argument("solve_vi_grid: d <= 3 required");
  if (resolution < 2) {
    throw std::invalid_argument("solve_vi_grid: resolution >= 2 required");
  }
  const Box bounds = bounding_box(c);

  auto gap_at = [&](const Vector& x) {
    return (x - project(c, x - map(x))).norm();
  };

  Vector best;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  const long total = static_cast<long>(std::pow(resolution, d));
  Vector candidate(d);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (Eigen::Index k = 0; k < d; ++k) {
      idx[k] = static_cast<int>(rem % resolution);
      rem /= resolution;
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      const double t =
          static_cast<double>(idx[k]) / static_cast<double>(resolution - 1);
      candidate[k] = bounds.lower[k] + t * (bounds.upper[k] - bounds.lower[k]);
    }
    const Vector point = project(c, candidate);
    const double gap = gap_at(point);
    if (gap < best_gap) {
      best_gap = gap;
      best = point;
    }
  }

  // Local bisection: halve a search box around the incumbent and rescan a
  // coarse local grid until the cell width reaches rounding scale.
  Vector halfwidth =
      (bounds.upper - bounds.lower) / static_cast<double>(resolution - 1);
  constexpr int kLocal = 5;
  for (int level = 0; level < 50; ++level) {
    const Vector center = best;
    const long local_total = static_cast<long>(std::pow(kLocal, d));
    for (long flat = 0; flat < local_total; ++flat) {
      long rem = flat;
      for (Eigen::Index k = 0; k < d; ++k) {
        const int j = static_cast<int>(rem % kLocal);
        rem /= kLocal;
        const double t = static_cast<double>(j) / (kLocal - 1) * 2.0 - 1.0;
        candidate[k] = center[k] + t * halfwidth[k];
      }
      const Vector point = project(
          c, Vector(candidate.cwiseMax(bounds.lower).cwiseMin(bounds.upper)));
      const double gap = gap_at(point);
      if (gap < best_gap) {
        best_gap = gap;
        best = point;
      }
    }
    halfwidth *= 0.5;
  }

  return OracleSolution{best, best_gap, "vi-grid"};
}

OracleSolution solve_affine_kkt(const Matrix& m, const Vector& u,
                                const Box& box) {
  const Eigen::Index d = u.size();
  if (d > 4) throw std::invalid_argument("solve_affine_kkt: d <= 4 required");
  if (m.rows() != d || m.cols() != d || box.lower.size() != d) {
    throw std::invalid_argument("solve_affine_kkt: dimension mismatch");
  }
  validate_set(ConvexSet{box});

  constexpr double kTol = 1e-10;
  const long patterns = static_cast<long>(std::pow(3, d));
  // Digit 0: free, 1: pinned at lower, 2: pinned at upper. The all-free
  // pattern comes first, so interior solutions are preferred.
  for (long code = 0; code < patterns; ++code) {
    long rem = code;
    std::vector<int> state(d);
    std::vector<Eigen::Index> free_idx;
    Vector x(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      state[k] = static_cast<int>(rem % 3);
      rem /= 3;
      if (state[k] == 0) {
        free_idx.push_back(k);
        x[k] = 0.0;
      } else {
        x[k] = state[k] == 1 ? box.lower[k] : box.upper[k];
      }
    }
    const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
    if (nf > 0) {
      Matrix mff(nf, nf);
      Vector rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        for (Eigen::Index b = 0; b < nf; ++b) {
          mff(a, b) = m(free_idx[a], free_idx[b]);
        }
        double fixed = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          if (state[k] != 0) fixed += m(free_idx[a], k) * x[k];
        }
        rhs[a] = -u[free_idx[a]] - fixed;
      }
      Eigen::FullPivLU<Matrix> lu(mff);
      if (!lu.isInvertible()) continue;
      const Vector xf = lu.solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) x[free_idx[a]] = xf[a];
    }

    const Vector grad = m * x + u;
    bool ok = true;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d && ok; ++k) {
      if (state[k] == 0) {
        ok = x[k] >= box.lower[k] - kTol && x[k] <= box.upper[k] + kTol;
        worst = std::max(worst, std::abs(grad[k]));
        ok = ok && std::abs(grad[k]) <= kTol;
      } else if (state[k] == 1) {
        ok = grad[k] >= -kTol;  // multiplier sign at the lower face
        worst = std::max(worst, std::max(0.0, -grad[k]));
      } else {
        ok = grad[k] <= kTol;
        worst = std::max(worst, std::max(0.0, grad[k]));
      }
    }
    if (ok) {
      return OracleSolution{
          Vector(x.cwiseMax(box.lower).cwiseMin(box.upper)), worst,
          "affine-kkt"};
    }
  }
  throw std::runtime_error(
      "solve_affine_kkt: no active-set pattern satisfies complementarity "
      "(empty solution set)");
}

double equilibrium_gap(const Bifunction& f, const MonotoneMap& b,
                       const Vector& x, int sample_count, std::uint64_t seed,
                       double halfwidth) {
  if (sample_count < 1) {
    throw std::invalid_argument("equilibrium_gap: sample_count >= 1");
  }
  if (!contains(f.c, x, 1e-9)) {
    throw std::invalid_argument("equilibrium_gap: x outside C");
  }
  const Vector bx = b.apply(x);
  auto rng = make_rng(seed, "equilibrium-gap");
  double gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < sample_count; ++k) {
    const Vector y = sample_in_set(rng, f.c, halfwidth);
    gap = std::max(gap, -(f.eval(x, y) + bx.dot(y - x)));
  }
  return gap;
}

}  // namespace opsplit
