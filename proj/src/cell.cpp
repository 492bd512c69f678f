#include "nandguard/cell.hpp"

#include <numeric>

namespace nandguard {

std::string_view to_string(CellState s) noexcept {
  switch (s) {
    case CellState::P0: return "P0";
    case CellState::P1: return "P1";
    case CellState::P2: return "P2";
    case CellState::P3: return "P3";
    case CellState::P4: return "P4";
    case CellState::P5: return "P5";
    case CellState::P6: return "P6";
    case CellState::P7: return "P7";
    case CellState::Erased: return "ERASED";
  }
  return "?";
}

std::optional<CellState> parse_cell_state(std::string_view text) noexcept {
  if (text == "ERASED" || text == "E") return CellState::Erased;
  if (text.size() == 2 && (text[0] == 'P' || text[0] == 'p') && text[1] >= '0' &&
      text[1] <= '7') {
    return static_cast<CellState>(text[1] - '0');
  }
  return std::nullopt;
}

std::optional<CellState> cell_state_from_code(std::uint8_t code) noexcept {
  if (code <= 7) return static_cast<CellState>(code);
  if (code == 0xF) return CellState::Erased;
  return std::nullopt;
}

std::size_t CellHistogram::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::array<std::size_t, kProgrammedLevels> CellHistogram::readable() const noexcept {
  std::array<std::size_t, kProgrammedLevels> out{};
  out[0] = counts_[0];
  for (std::size_t level = 0; level < kProgrammedLevels; ++level) {
    out[level] += counts_[level + 1];
  }
  return out;
}

}  // namespace nandguard
