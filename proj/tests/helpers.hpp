#pragma once

#include <string>

#include "nandguard/device.hpp"
#include "nandguard/error.hpp"
#include "nandguard/random.hpp"

namespace nandguard::testing {

inline std::string random_printable(Rng& rng, std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + uniform_below(rng, max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(' ' + uniform_below(rng, 95)));
  return s;
}

// 144 cells carry exactly 6 sectors of 64 bits.
inline Geometry geometry_144() {
  Geometry g;
  g.cells_per_page = 144;
  g.sectors_per_page = 6;
  return g;
}

}  // namespace nandguard::testing
