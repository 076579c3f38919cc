#include "opsplit/vector_space.hpp"

#include <cmath>
#include <stdexcept>

namespace opsplit {

double inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("inner: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  return a.dot(b);
}

double norm(const Vector& x) { return x.norm(); }

bool all_finite(const Vector& x) { return x.allFinite(); }

void require_vector(const Vector& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(x.size()));
  }
  if (!all_finite(x)) {
    throw std::invalid_argument(std::string(what) +
                                ": non-finite coordinate");
  }
}

namespace {

void check_dim(const ConvexSet& set, const Vector& x, const char* what) {
  const Eigen::Index d = dim_of(set);
  if (x.size() != d) {
    throw std::invalid_argument(std::string(what) + ": point has dimension " +
                                std::to_string(x.size()) + ", set expects " +
                                std::to_string(d));
  }
}

}  // namespace

Eigen::Index dim_of(const ConvexSet& set) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WholeSpace>) {
          return s.dim;
        } else if constexpr (std::is_same_v<S, Box>) {
          return s.lower.size();
        } else if constexpr (std::is_same_v<S, Ball>) {
          return s.center.size();
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          return s.normal.size();
        } else {
          if (s.members.empty()) return 0;
          return std::visit([](const auto& m) { return dim_of(ConvexSet{m}); },
                            s.members.front());
        }
      },
      set);
}

void validate_set(const ConvexSet& set) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WholeSpace>) {
          if (s.dim <= 0) throw std::invalid_argument("WholeSpace: dim <= 0");
        } else if constexpr (std::is_same_v<S, Box>) {
          if (s.lower.size() != s.upper.size()) {
            throw std::invalid_argument("Box: lower/upper dimension mismatch");
          }
          if (!all_finite(s.lower) || !all_finite(s.upper)) {
            throw std::invalid_argument("Box: non-finite bound");
          }
          if ((s.lower.array() > s.upper.array()).any()) {
            throw std::invalid_argument("Box: lower > upper");
          }
        } else if constexpr (std::is_same_v<S, Ball>) {
          if (!all_finite(s.center)) {
            throw std::invalid_argument("Ball: non-finite center");
          }
          if (!(s.radius > 0.0)) {
            throw std::invalid_argument("Ball: radius must be > 0");
          }
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          if (!all_finite(s.normal) || !std::isfinite(s.offset)) {
            throw std::invalid_argument("HalfSpace: non-finite data");
          }
          if (!(s.normal.norm() > 0.0)) {
            throw std::invalid_argument("HalfSpace: zero normal");
          }
        } else {
          if (s.members.empty()) {
            throw std::invalid_argument("Intersection: no members");
          }
          Eigen::Index d = -1;
          for (const auto& m : s.members) {
            const ConvexSet member =
                std::visit([](const auto& b) { return ConvexSet{b}; }, m);
            validate_set(member);
            const Eigen::Index md = dim_of(member);
            if (d >= 0 && md != d) {
              throw std::invalid_argument(
                  "Intersection: member dimension mismatch");
            }
            d = md;
          }
        }
      },
      set);
}

bool contains(const ConvexSet& set, const Vector& x, double tol) {
  check_dim(set, x, "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<S, Box>) {
          return (x.array() >= s.lower.array() - tol).all() &&
                 (x.array() <= s.upper.array() + tol).all();
        } else if constexpr (std::is_same_v<S, Ball>) {
          return (x - s.center).norm() <= s.radius + tol;
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          return s.normal.dot(x) <= s.offset + tol;
        } else {
          for (const auto& m : s.members) {
            const bool ok = std::visit(
                [&](const auto& b) { return contains(ConvexSet{b}, x, tol); },
                m);
            if (!ok) return false;
          }
          return true;
        }
      },
      set);
}

Vector project(const ConvexSet& set, const Vector& x) {
  check_dim(set, x, "project");
  return std::visit(
      [&](const auto& s) -> Vector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WholeSpace>) {
          return x;
        } else if constexpr (std::is_same_v<S, Box>) {
          return project_box(s, x);
        } else if constexpr (std::is_same_v<S, Ball>) {
          return project_ball(s, x);
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          return project_halfspace(s, x);
        } else {
          throw std::invalid_argument(
              "project: no closed-form projection onto an intersection");
        }
      },
      set);
}

double feasibility_distance(const ConvexSet& set, const Vector& x) {
  if (const auto* inter = std::get_if<Intersection>(&set)) {
    double worst = 0.0;
    for (const auto& m : inter->members) {
      const double d = std::visit(
          [&](const auto& b) { return feasibility_distance(ConvexSet{b}, x); },
          m);
      worst = std::max(worst, d);
    }
    return worst;
  }
  return (x - project(set, x)).norm();
}

Vector project_halfspace(const HalfSpace& h, const Vector& x) {
  if (h.normal.size() != x.size()) {
    throw std::invalid_argument("project_halfspace: dimension mismatch");
  }
  const double nn = h.normal.squaredNorm();
  if (!(nn > 0.0)) {
    throw std::invalid_argument("project_halfspace: zero normal");
  }
  const double viol = h.normal.dot(x) - h.offset;
  if (viol <= 0.0) return x;
  return x - (viol / nn) * h.normal;
}

Vector project_box(const Box& b, const Vector& x) {
  if (b.lower.size() != x.size() || b.upper.size() != x.size()) {
    throw std::invalid_argument("project_box: dimension mismatch");
  }
  return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

Vector project_ball(const Ball& b, const Vector& x) {
  if (b.center.size() != x.size()) {
    throw std::invalid_argument("project_ball: dimension mismatch");
  }
  if (!(b.radius > 0.0)) {
    throw std::invalid_argument("project_ball: radius must be > 0");
  }
  const Vector diff = x - b.center;
  const double d = diff.norm();
  if (d <= b.radius) return x;
  return b.center + (b.radius / d) * diff;
}

}  // namespace opsplit
