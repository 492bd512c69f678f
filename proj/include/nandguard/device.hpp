#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nandguard/bit_vector.hpp"
#include "nandguard/cell.hpp"
#include "nandguard/error.hpp"
#include "nandguard/random.hpp"

namespace nandguard {

struct Geometry {
  std::uint32_t blocks_per_device = 16;
  std::uint32_t pages_per_block = 9;
  std::uint32_t cells_per_page = 171;
  std::uint32_t sectors_per_page = 8;
  std::uint32_t bits_per_sector = 64;
  std::uint32_t endurance_limit = 1000;

  // Throws ConfigError when a field is zero or the sectors do not fit the
  // cells of a page.
  void validate() const;

  std::size_t page_count() const noexcept {
    return static_cast<std::size_t>(blocks_per_device) * pages_per_block;
  }
  std::size_t page_bits() const noexcept { return kBitsPerCell * cells_per_page; }
  // Bits covered by sectors; anything beyond is mapping padding.
  std::size_t sector_bits_per_page() const noexcept {
    return static_cast<std::size_t>(sectors_per_page) * bits_per_sector;
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct PageAddress {
  std::uint32_t block = 0;
  std::uint32_t page = 0;

  friend auto operator<=>(const PageAddress&, const PageAddress&) = default;
};

std::string to_string(const PageAddress& addr);

enum class Validity : std::uint8_t { Free = 0, Valid = 1, Invalid = 2 };

std::string_view to_string(Validity v) noexcept;

enum class ProgramMode { Full, PartialOverwrite };

// Disturb weight charged to each adjacent page of the same block per
// programming event. Ordinal encoding of High / Medium / Low program
// disturbance.
namespace disturb_weight {
inline constexpr unsigned kNormal = 1;
inline constexpr unsigned kScrub = 3;
inline constexpr unsigned kPartialOverwrite = 2;
inline constexpr unsigned kDownBit = 1;
inline constexpr unsigned kDeletionPulse = 1;
}  // namespace disturb_weight

struct PhysicalPage {
  std::vector<CellState> cells;
  Validity validity = Validity::Free;
  std::optional<std::int64_t> logical_owner;
  std::uint32_t disturb_count = 0;

  friend bool operator==(const PhysicalPage&, const PhysicalPage&) = default;
};

struct Block {
  std::vector<PhysicalPage> pages;
  std::uint32_t pe_cycles = 0;
  bool bad = false;
  bool managed = true;

  friend bool operator==(const Block&, const Block&) = default;
};

struct PageBufferResult {
  BitVector sensed_bits;
  BitVector xor_bits;
  std::size_t ones_count = 0;
};

struct EraseOutcome {
  std::uint32_t pe_cycles = 0;
  bool became_bad = false;
};

struct ProgramOutcome {
  // Sum of disturb increments applied to neighbouring pages.
  std::size_t disturb_events = 0;
};

// Bit-accurate NAND array. Mutations require exclusive access; the const
// interface is safe to share between readers.
class Device {
 public:
  explicit Device(Geometry geometry = {});

  const Geometry& geometry() const noexcept { return geometry_; }

  const Block& block(std::uint32_t index) const;
  const PhysicalPage& page(PageAddress addr) const;

  std::size_t global_page_index(PageAddress addr) const;
  PageAddress address_of(std::size_t global_index) const;

  EraseOutcome erase_block(std::uint32_t index);

  // Full programming needs a FREE page; partial overwrite may only raise
  // cells. Targets shorter than the page leave the remaining cells as they
  // are. A FREE page that ends up holding charge becomes INVALID until the
  // caller maps it.
  ProgramOutcome program_page(PageAddress addr, std::span<const CellState> target,
                              ProgramMode mode,
                              unsigned disturb = disturb_weight::kNormal);

  // Direct 3-bit-per-cell sensing, b2 b1 b0 per cell, Erased as 000.
  BitVector read_page(PageAddress addr) const;
  BitVector read_page(PageAddress addr, double ber, Rng& rng) const;

  // Page-buffer XOR of one sector against reference bits.
  PageBufferResult sense_and_compare(PageAddress addr, std::size_t sector_index,
                                     const BitVector& reference_bits) const;

  CellHistogram cell_count_histogram(PageAddress addr) const;

  void mark_valid(PageAddress addr, std::int64_t lpn);
  void mark_invalid(PageAddress addr);
  void set_managed(std::uint32_t index, bool managed);
  void mark_bad(std::uint32_t index);

  // Used by the image loader; bypasses the programming rules.
  void restore_block(std::uint32_t index, std::uint32_t pe_cycles, bool bad,
                     bool managed);
  void restore_page(PageAddress addr, PhysicalPage page);

  friend bool operator==(const Device&, const Device&) = default;

 private:
  void check(PageAddress addr) const;
  PhysicalPage& mutable_page(PageAddress addr);

  Geometry geometry_;
  std::vector<Block> blocks_;
};

// Raw sensing of a state sequence, identical to Device::read_page.
BitVector sense_states(std::span<const CellState> states);

}  // namespace nandguard
