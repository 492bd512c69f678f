#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace nandguard {

// Programmed level of one 3-bit cell. The numeric values double as the 4-bit
// codes of the flash image format.
enum class CellState : std::uint8_t {
  P0 = 0,
  P1 = 1,
  P2 = 2,
  P3 = 3,
  P4 = 4,
  P5 = 5,
  P6 = 6,
  P7 = 7,
  Erased = 0xF,
};

inline constexpr std::size_t kBitsPerCell = 3;
inline constexpr std::size_t kProgrammedLevels = 8;

// Ordering used by the one-way programming rule: Erased < P0 < ... < P7.
constexpr int rank(CellState s) noexcept {
  return s == CellState::Erased ? 0 : static_cast<int>(s) + 1;
}

constexpr CellState from_rank(int r) noexcept {
  return r <= 0 ? CellState::Erased : static_cast<CellState>(r > 8 ? 7 : r - 1);
}

// Level a sensing operation resolves the cell to. Erased reads as P0.
constexpr int read_level(CellState s) noexcept {
  return s == CellState::Erased ? 0 : static_cast<int>(s);
}

constexpr CellState programmed_level(int level) noexcept {
  return static_cast<CellState>(level & 7);
}

std::string_view to_string(CellState s) noexcept;
std::optional<CellState> parse_cell_state(std::string_view text) noexcept;
std::optional<CellState> cell_state_from_code(std::uint8_t code) noexcept;

// Per-state cell counts of one page, as the on-chip cell counter reports them.
class CellHistogram {
 public:
  void add(CellState s) { ++counts_[slot(s)]; }
  std::size_t count(CellState s) const { return counts_[slot(s)]; }
  std::size_t total() const noexcept;

  // Eight readable distributions; Erased folds into P0.
  std::array<std::size_t, kProgrammedLevels> readable() const noexcept;

  friend bool operator==(const CellHistogram&, const CellHistogram&) = default;

 private:
  static std::size_t slot(CellState s) noexcept {
    return static_cast<std::size_t>(rank(s));
  }
  std::array<std::size_t, kProgrammedLevels + 1> counts_{};
};

}  // namespace nandguard
