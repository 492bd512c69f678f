#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nandguard/bit_vector.hpp"
#include "nandguard/cell.hpp"
#include "nandguard/device.hpp"

namespace nandguard {

// 8-bit character codes, most significant bit first. Characters above 0x7F
// raise NonAsciiCharacter.
BitVector encode_text(std::string_view text);

// Inverse of encode_text over whole bytes; stops at the first NUL byte and
// ignores a trailing partial byte.
std::string decode_text(const BitVector& bits);

// ---------------------------------------------------------------------------
// Scrambler: 16-bit Fibonacci LFSR whose output is XORed onto the data. The
// per-page seed is seed_base ^ (page index & 0xFFFF), with 0 replaced by 1.

struct ScramblerConfig {
  // Tap positions in polynomial notation, e.g. {16, 14, 13, 11} for
  // x^16 + x^14 + x^13 + x^11 + 1.
  std::vector<unsigned> taps{16, 14, 13, 11};
  std::uint16_t seed_base = 0xACE1;

  // Throws ConfigError unless the taps give a maximal-length register.
  void validate() const;
  std::uint16_t tap_mask() const;
  std::uint16_t page_seed(std::uint64_t page_index) const noexcept;

  friend bool operator==(const ScramblerConfig&, const ScramblerConfig&) = default;
};

std::vector<unsigned> taps_from_mask(std::uint16_t mask);

class Lfsr16 {
 public:
  Lfsr16(std::uint16_t seed, std::uint16_t tap_mask) noexcept
      : state_(seed == 0 ? 1 : seed), tap_mask_(tap_mask) {}

  // Emits the low bit, then shifts the feedback into bit 15.
  bool next() noexcept {
    const bool out = (state_ & 1u) != 0;
    const unsigned feedback = static_cast<unsigned>(__builtin_popcount(state_ & tap_mask_)) & 1u;
    state_ = static_cast<std::uint16_t>((state_ >> 1) | (feedback << 15));
    return out;
  }

  std::uint16_t state() const noexcept { return state_; }

 private:
  std::uint16_t state_;
  std::uint16_t tap_mask_;
};

BitVector keystream(const ScramblerConfig& config, std::uint64_t page_index,
                    std::size_t length);

// Self-inverse: scramble(scramble(b, p), p) == b.
BitVector scramble(const BitVector& bits, std::uint64_t page_index,
                   const ScramblerConfig& config);
inline BitVector descramble(const BitVector& bits, std::uint64_t page_index,
                            const ScramblerConfig& config) {
  return scramble(bits, page_index, config);
}

// ---------------------------------------------------------------------------
// State mapping: 3-bit groups (b2 b1 b0) onto programmed levels.

class MappingTable {
 public:
  // 000 -> P0 ... 111 -> P7.
  static MappingTable direct() noexcept;
  // Throws ConfigError unless forward is a bijection onto P0..P7.
  static MappingTable from_forward(const std::array<CellState, 8>& forward);

  CellState map(unsigned group) const noexcept { return forward_[group & 7]; }
  // Erased reads as P0 before the inverse is applied.
  unsigned unmap(CellState s) const noexcept {
    return inverse_[static_cast<std::size_t>(read_level(s))];
  }

  const std::array<CellState, 8>& forward() const noexcept { return forward_; }

  friend bool operator==(const MappingTable&, const MappingTable&) = default;

 private:
  MappingTable() = default;
  std::array<CellState, 8> forward_{};
  std::array<unsigned, 8> inverse_{};
};

struct MappedStates {
  std::vector<CellState> states;
  std::size_t pad_bits = 0;
};

// Pads with zero bits to a multiple of three and maps each group.
MappedStates map_to_states(const BitVector& bits, const MappingTable& table);
BitVector unmap_states(std::span<const CellState> states, const MappingTable& table);

// ---------------------------------------------------------------------------
// ECC model: bounded-distance decoding against the stored codeword.

struct EccConfig {
  std::uint32_t sector_bits = 64;
  std::uint32_t t = 8;

  void validate() const;

  friend bool operator==(const EccConfig&, const EccConfig&) = default;
};

struct DecodeResult {
  BitVector data;
  std::size_t corrections_used = 0;
};

// Succeeds iff hamming_distance(read_bits, reference_codeword) <= t.
// Throws LengthMismatch or DecodeFailure.
DecodeResult ecc_decode(const BitVector& read_bits, const BitVector& reference_codeword,
                        const EccConfig& config);

inline bool ecc_correctable(std::size_t distance, const EccConfig& config) noexcept {
  return distance <= config.t;
}

// Hamming distance of each consecutive sector of two equally sized vectors.
std::vector<std::size_t> sector_distances(const BitVector& a, const BitVector& b,
                                          std::size_t sector_bits);

// Smallest of distances[s] over the listed sectors.
std::size_t min_over(const std::vector<std::size_t>& distances,
                     const std::vector<std::size_t>& sectors);

// ---------------------------------------------------------------------------

struct CodecConfig {
  ScramblerConfig scrambler;
  MappingTable mapping = MappingTable::direct();
  EccConfig ecc;

  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

// Page-level data path. A payload is zero-padded to the sector area of the
// page, scrambled with the page's own seed and mapped onto the page's cells.
class PageCodec {
 public:
  PageCodec(const Geometry& geometry, CodecConfig config);

  const CodecConfig& config() const noexcept { return config_; }
  const Geometry& geometry() const noexcept { return geometry_; }

  std::size_t capacity_bits() const noexcept { return geometry_.sector_bits_per_page(); }
  std::size_t capacity_chars() const noexcept { return capacity_bits() / 8; }

  // Sectors that carry payload bits (padding-only sectors excluded).
  std::size_t content_sectors(std::size_t payload_bits) const noexcept;

  // Content sectors that count as evidence of the payload: the first one,
  // and any later one the payload fills more than half of. A short tail is
  // mostly zero padding and lies within t of any text of similar length.
  std::vector<std::size_t> evidence_sectors(std::size_t payload_bits) const;

  BitVector codeword(const BitVector& payload, std::uint64_t page_index) const;
  std::vector<CellState> states_for(const BitVector& codeword) const;

  // What the page buffers sense over the sector area when the payload sits
  // at page_index.
  BitVector sensed_reference(const BitVector& payload, std::uint64_t page_index) const;

  // Raw sensed page bits back to the scrambled codeword.
  BitVector codeword_from_sensed(const BitVector& raw_page_bits) const;
  BitVector payload_from_codeword(const BitVector& codeword,
                                  std::uint64_t page_index) const;

  friend bool operator==(const PageCodec&, const PageCodec&) = default;

 private:
  Geometry geometry_;
  CodecConfig config_;
};

}  // namespace nandguard
