#pragma once

#include "opsplit/vector_space.hpp"

#include <cstdint>
#include <random>
#include <string_view>

// Deterministic sampling utilities. Every random quantity in the library is
// derived from a single user seed through mix_seed, so identical seeds give
// identical runs regardless of query order.

namespace opsplit {

/// splitmix64-style mix of a base seed, a purpose tag, and an index.
/// Pure: the same (seed, tag, index) always yields the same stream seed.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag,
                       std::uint64_t index = 0);

/// Fresh engine for a derived stream.
std::mt19937_64 make_rng(std::uint64_t seed, std::string_view tag,
                         std::uint64_t index = 0);

/// Uniform point in the cube [-halfwidth, halfwidth]^dim.
Vector sample_cube(std::mt19937_64& rng, Eigen::Index dim, double halfwidth);

/// Unit vector with rotation-invariant direction.
Vector unit_direction(std::mt19937_64& rng, Eigen::Index dim);

/// Point of the set. Boxes and balls are sampled natively (balls via the
/// radial density); half-spaces and the whole space draw from a cube of the
/// given halfwidth, projected into the set; intersections project a cube
/// sample onto each member cyclically and are therefore approximate near
/// corners (sufficient for certificate sampling).
Vector sample_in_set(std::mt19937_64& rng, const ConvexSet& set,
                     double halfwidth = 5.0);

}  // namespace opsplit
