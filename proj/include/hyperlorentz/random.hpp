#pragma once

#include <cstdint>
#include <random>

namespace hyperlorentz {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for replica `index` of stream family `seed`. Depends only on the
/// pair, never on which worker runs the replica or in what order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t family = 0) {
  return mix64(mix64(mix64(seed) ^ index) ^ (family * 0xd1b54a32d192ed03ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t family = 0) {
  return Rng(derive_seed(seed, index, family));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace hyperlorentz
