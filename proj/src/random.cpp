#include "opsplit/random.hpp"

#include <cmath>

namespace opsplit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag,
                       std::uint64_t index) {
  std::uint64_t state = seed;
  (void)splitmix64(state);
  for (const char c : tag) {
    state ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    (void)splitmix64(state);
  }
  state ^= index;
  return splitmix64(state);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view tag,
                         std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed, tag, index));
}

Vector sample_cube(std::mt19937_64& rng, Eigen::Index dim, double halfwidth) {
  std::uniform_real_distribution<double> u(-halfwidth, halfwidth);
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = u(rng);
  return x;
}

Vector unit_direction(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector x(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = g(rng);
    n = x.norm();
  } while (!(n > 1e-12));
  return x / n;
}

Vector sample_in_set(std::mt19937_64& rng, const ConvexSet& set,
                     double halfwidth) {
  const Eigen::Index d = dim_of(set);
  return std::visit(
      [&](const auto& s) -> Vector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WholeSpace>) {
          return sample_cube(rng, d, halfwidth);
        } else if constexpr (std::is_same_v<S, Box>) {
          Vector x(d);
          for (Eigen::Index i = 0; i < d; ++i) {
            std::uniform_real_distribution<double> u(s.lower[i], s.upper[i]);
            x[i] = u(rng);
          }
          return x;
        } else if constexpr (std::is_same_v<S, Ball>) {
          const Vector dir = unit_direction(rng, d);
          std::uniform_real_distribution<double> u(0.0, 1.0);
          const double r =
              s.radius * std::pow(u(rng), 1.0 / static_cast<double>(d));
          return s.center + r * dir;
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          return project_halfspace(s, sample_cube(rng, d, halfwidth));
        } else {
          Vector x = sample_cube(rng, d, halfwidth);
          for (int round = 0; round < 8; ++round) {
            for (const auto& m : s.members) {
              x = std::visit(
                  [&](const auto& b) { return project(ConvexSet{b}, x); }, m);
            }
          }
          return x;
        }
      },
      set);
}

}  // namespace opsplit
