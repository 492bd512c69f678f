#include "nandguard/codec.hpp"

#include <algorithm>
#include <cstdint>

#include "nandguard/error.hpp"

namespace nandguard {

BitVector encode_text(std::string_view text) {
  BitVector bits;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c > 0x7F) {
      throw Error(ErrorCode::NonAsciiCharacter,
                  "byte " + std::to_string(static_cast<unsigned>(c)) + " at offset " +
                      std::to_string(i));
    }
    for (int shift = 7; shift >= 0; --shift) bits.push_back(((c >> shift) & 1u) != 0);
  }
  return bits;
}

std::string decode_text(const BitVector& bits) {
  std::string out;
  for (std::size_t i = 0; i + 8 <= bits.size(); i += 8) {
    unsigned c = 0;
    for (std::size_t j = 0; j < 8; ++j) c = (c << 1) | (bits[i + j] ? 1u : 0u);
    if (c == 0) break;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

// --- scrambler --------------------------------------------------------------

std::uint16_t ScramblerConfig::tap_mask() const {
  std::uint16_t mask = 0;
  for (unsigned tap : taps) {
    if (tap < 1 || tap > 16) {
      throw Error(ErrorCode::ConfigError, "tap " + std::to_string(tap) + " outside 1..16");
    }
    mask = static_cast<std::uint16_t>(mask | (1u << (16 - tap)));
  }
  return mask;
}

std::vector<unsigned> taps_from_mask(std::uint16_t mask) {
  std::vector<unsigned> taps;
  for (unsigned tap = 16; tap >= 1; --tap) {
    if ((mask >> (16 - tap)) & 1u) taps.push_back(tap);
  }
  return taps;
}

void ScramblerConfig::validate() const {
  const std::uint16_t mask = tap_mask();
  if ((mask & 1u) == 0) {
    throw Error(ErrorCode::ConfigError, "tap 16 is required");
  }
  Lfsr16 reg(1, mask);
  std::uint32_t period = 0;
  do {
    reg.next();
    ++period;
  } while (reg.state() != 1 && period <= 0xFFFF);
  if (period != 0xFFFF) {
    throw Error(ErrorCode::ConfigError,
                "taps are not maximal-length (period " + std::to_string(period) + ")");
  }
}

std::uint16_t ScramblerConfig::page_seed(std::uint64_t page_index) const noexcept {
  const auto seed = static_cast<std::uint16_t>(seed_base ^ (page_index & 0xFFFFu));
  return seed == 0 ? std::uint16_t{1} : seed;
}

BitVector keystream(const ScramblerConfig& config, std::uint64_t page_index,
                    std::size_t length) {
  Lfsr16 reg(config.page_seed(page_index), config.tap_mask());
  BitVector out(length);
  for (std::size_t i = 0; i < length; ++i) out.set(i, reg.next());
  return out;
}

BitVector scramble(const BitVector& bits, std::uint64_t page_index,
                   const ScramblerConfig& config) {
  return bits ^ keystream(config, page_index, bits.size());
}

// --- state mapping ----------------------------------------------------------

MappingTable MappingTable::direct() noexcept {
  MappingTable t;
  for (unsigned g = 0; g < 8; ++g) {
    t.forward_[g] = programmed_level(static_cast<int>(g));
    t.inverse_[g] = g;
  }
  return t;
}

MappingTable MappingTable::from_forward(const std::array<CellState, 8>& forward) {
  MappingTable t;
  std::array<bool, 8> seen{};
  for (unsigned g = 0; g < 8; ++g) {
    const CellState s = forward[g];
    if (s == CellState::Erased) {
      throw Error(ErrorCode::ConfigError, "mapping table cannot target ERASED");
    }
    const auto level = static_cast<std::size_t>(s);
    if (seen[level]) {
      throw Error(ErrorCode::ConfigError, "mapping table is not a bijection");
    }
    seen[level] = true;
    t.forward_[g] = s;
    t.inverse_[level] = g;
  }
  return t;
}

MappedStates map_to_states(const BitVector& bits, const MappingTable& table) {
  MappedStates out;
  out.pad_bits = (kBitsPerCell - bits.size() % kBitsPerCell) % kBitsPerCell;
  const std::size_t cells = (bits.size() + out.pad_bits) / kBitsPerCell;
  out.states.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    unsigned group = 0;
    for (std::size_t j = 0; j < kBitsPerCell; ++j) {
      const std::size_t i = c * kBitsPerCell + j;
      group = (group << 1) | ((i < bits.size() && bits[i]) ? 1u : 0u);
    }
    out.states.push_back(table.map(group));
  }
  return out;
}

BitVector unmap_states(std::span<const CellState> states, const MappingTable& table) {
  BitVector bits(states.size() * kBitsPerCell);
  for (std::size_t c = 0; c < states.size(); ++c) {
    const unsigned group = table.unmap(states[c]);
    bits.set(3 * c, (group & 4u) != 0);
    bits.set(3 * c + 1, (group & 2u) != 0);
    bits.set(3 * c + 2, (group & 1u) != 0);
  }
  return bits;
}

// --- ECC --------------------------------------------------------------------

void EccConfig::validate() const {
  if (sector_bits == 0) throw Error(ErrorCode::ConfigError, "sector_bits must be positive");
  if (2 * static_cast<std::uint64_t>(t) >= sector_bits) {
    throw Error(ErrorCode::ConfigError,
                "correction capability t=" + std::to_string(t) +
                    " must be below sector_bits/2");
  }
}

DecodeResult ecc_decode(const BitVector& read_bits, const BitVector& reference_codeword,
                        const EccConfig& config) {
  if (read_bits.size() != config.sector_bits ||
      reference_codeword.size() != config.sector_bits) {
    throw Error(ErrorCode::LengthMismatch,
                "ecc_decode expects " + std::to_string(config.sector_bits) + " bits");
  }
  const std::size_t distance = hamming_distance(read_bits, reference_codeword);
  if (!ecc_correctable(distance, config)) {
    throw Error(ErrorCode::DecodeFailure,
                std::to_string(distance) + " bit errors exceed t=" +
                    std::to_string(config.t));
  }
  return {reference_codeword, distance};
}

std::vector<std::size_t> sector_distances(const BitVector& a, const BitVector& b,
                                          std::size_t sector_bits) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "sector_distances of unequal vectors");
  }
  std::vector<std::size_t> out;
  for (std::size_t off = 0; off + sector_bits <= a.size(); off += sector_bits) {
    std::size_t d = 0;
    for (std::size_t i = off; i < off + sector_bits; ++i) d += a[i] != b[i] ? 1 : 0;
    out.push_back(d);
  }
  return out;
}

// --- page codec -------------------------------------------------------------

PageCodec::PageCodec(const Geometry& geometry, CodecConfig config)
    : geometry_(geometry), config_(std::move(config)) {
  geometry_.validate();
  config_.scrambler.validate();
  config_.scrambler.taps = taps_from_mask(config_.scrambler.tap_mask());
  config_.ecc.validate();
  if (config_.ecc.sector_bits != geometry_.bits_per_sector) {
    throw Error(ErrorCode::ConfigError,
                "ecc sector_bits " + std::to_string(config_.ecc.sector_bits) +
                    " differs from geometry bits_per_sector " +
                    std::to_string(geometry_.bits_per_sector));
  }
}

std::size_t PageCodec::content_sectors(std::size_t payload_bits) const noexcept {
  const std::size_t per = geometry_.bits_per_sector;
  return std::min<std::size_t>((payload_bits + per - 1) / per, geometry_.sectors_per_page);
}

std::size_t min_over(const std::vector<std::size_t>& distances,
                     const std::vector<std::size_t>& sectors) {
  std::size_t best = SIZE_MAX;
  for (std::size_t s : sectors) best = std::min(best, distances.at(s));
  return best;
}

std::vector<std::size_t> PageCodec::evidence_sectors(std::size_t payload_bits) const {
  const std::size_t per = geometry_.bits_per_sector;
  std::vector<std::size_t> out;
  const std::size_t n = content_sectors(payload_bits);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t filled = std::min(per, payload_bits - s * per);
    if (s == 0 || 2 * filled > per) out.push_back(s);
  }
  return out;
}

BitVector PageCodec::codeword(const BitVector& payload, std::uint64_t page_index) const {
  if (payload.size() > capacity_bits()) {
    throw Error(ErrorCode::LengthMismatch,
                "payload of " + std::to_string(payload.size()) + " bits exceeds page capacity " +
                    std::to_string(capacity_bits()));
  }
  BitVector padded = payload;
  padded.resize(capacity_bits(), false);
  return scramble(padded, page_index, config_.scrambler);
}

std::vector<CellState> PageCodec::states_for(const BitVector& codeword) const {
  MappedStates mapped = map_to_states(codeword, config_.mapping);
  // Cells past the codeword are programmed as if padded with zero bits.
  mapped.states.resize(geometry_.cells_per_page, config_.mapping.map(0));
  return std::move(mapped.states);
}

BitVector PageCodec::sensed_reference(const BitVector& payload,
                                      std::uint64_t page_index) const {
  const auto states = states_for(codeword(payload, page_index));
  return sense_states(states).slice(0, capacity_bits());
}

BitVector PageCodec::codeword_from_sensed(const BitVector& raw_page_bits) const {
  if (raw_page_bits.size() != geometry_.page_bits()) {
    throw Error(ErrorCode::LengthMismatch, "sensed page length");
  }
  // Raw sensing is direct binary; route through states to honour any table.
  const MappedStates states = map_to_states(raw_page_bits, MappingTable::direct());
  return unmap_states(states.states, config_.mapping).slice(0, capacity_bits());
}

BitVector PageCodec::payload_from_codeword(const BitVector& codeword,
                                           std::uint64_t page_index) const {
  return descramble(codeword, page_index, config_.scrambler);
}

}  // namespace nandguard
