#pragma once

#include <cstdint>
#include <random>

namespace nandguard {

// All seeded randomness goes through this engine. The helpers below avoid
// std:: distributions so seeded runs are identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

// Uniform in [0, 1).
inline double unit_interval(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace nandguard
