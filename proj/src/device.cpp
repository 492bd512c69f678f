#include "nandguard/device.hpp"

#include <algorithm>

#include "nandguard/error.hpp"

namespace nandguard {

void Geometry::validate() const {
  if (blocks_per_device == 0 || pages_per_block == 0 || cells_per_page == 0 ||
      sectors_per_page == 0 || bits_per_sector == 0 || endurance_limit == 0) {
    throw Error(ErrorCode::ConfigError, "geometry fields must be positive");
  }
  if (sector_bits_per_page() > page_bits()) {
    throw Error(ErrorCode::ConfigError,
                "sectors_per_page x bits_per_sector exceeds 3 x cells_per_page");
  }
}

std::string to_string(const PageAddress& addr) {
  return std::to_string(addr.block) + ":" + std::to_string(addr.page);
}

std::string_view to_string(Validity v) noexcept {
  switch (v) {
    case Validity::Free: return "FREE";
    case Validity::Valid: return "VALID";
    case Validity::Invalid: return "INVALID";
  }
  return "?";
}

Device::Device(Geometry geometry) : geometry_(geometry) {
  geometry_.validate();
  PhysicalPage blank;
  blank.cells.assign(geometry_.cells_per_page, CellState::Erased);
  Block block;
  block.pages.assign(geometry_.pages_per_block, blank);
  blocks_.assign(geometry_.blocks_per_device, block);
}

const Block& Device::block(std::uint32_t index) const {
  if (index >= blocks_.size()) {
    throw Error(ErrorCode::OutOfRange, "block " + std::to_string(index));
  }
  return blocks_[index];
}

void Device::check(PageAddress addr) const {
  if (addr.block >= blocks_.size() || addr.page >= geometry_.pages_per_block) {
    throw Error(ErrorCode::OutOfRange, "page " + to_string(addr));
  }
}

const PhysicalPage& Device::page(PageAddress addr) const {
  check(addr);
  return blocks_[addr.block].pages[addr.page];
}

PhysicalPage& Device::mutable_page(PageAddress addr) {
  check(addr);
  return blocks_[addr.block].pages[addr.page];
}

std::size_t Device::global_page_index(PageAddress addr) const {
  check(addr);
  return static_cast<std::size_t>(addr.block) * geometry_.pages_per_block + addr.page;
}

PageAddress Device::address_of(std::size_t global_index) const {
  if (global_index >= geometry_.page_count()) {
    throw Error(ErrorCode::OutOfRange, "global page " + std::to_string(global_index));
  }
  return {static_cast<std::uint32_t>(global_index / geometry_.pages_per_block),
          static_cast<std::uint32_t>(global_index % geometry_.pages_per_block)};
}

EraseOutcome Device::erase_block(std::uint32_t index) {
  if (index >= blocks_.size()) {
    throw Error(ErrorCode::OutOfRange, "block " + std::to_string(index));
  }
  Block& b = blocks_[index];
  if (b.bad) throw Error(ErrorCode::BadBlock, "erase of block " + std::to_string(index));
  for (auto& p : b.pages) {
    std::fill(p.cells.begin(), p.cells.end(), CellState::Erased);
    p.validity = Validity::Free;
    p.logical_owner.reset();
    p.disturb_count = 0;
  }
  ++b.pe_cycles;
  EraseOutcome out{b.pe_cycles, false};
  if (b.pe_cycles >= geometry_.endurance_limit) {
    b.bad = true;
    b.managed = false;
    out.became_bad = true;
  }
  return out;
}

ProgramOutcome Device::program_page(PageAddress addr, std::span<const CellState> target,
                                    ProgramMode mode, unsigned disturb) {
  check(addr);
  Block& b = blocks_[addr.block];
  if (b.bad) throw Error(ErrorCode::BadBlock, "program of page " + to_string(addr));
  PhysicalPage& p = b.pages[addr.page];
  if (target.size() > p.cells.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(target.size()) + " states for a page of " +
                    std::to_string(p.cells.size()) + " cells");
  }
  if (mode == ProgramMode::Full) {
    if (p.validity != Validity::Free) {
      throw Error(ErrorCode::NotErased, "full program of page " + to_string(addr));
    }
  } else {
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (rank(target[i]) < rank(p.cells[i])) {
        throw Error(ErrorCode::DownwardProgram,
                    "cell " + std::to_string(i) + " of page " + to_string(addr) + " " +
                        std::string(to_string(p.cells[i])) + " -> " +
                        std::string(to_string(target[i])));
      }
    }
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (rank(target[i]) > rank(p.cells[i])) p.cells[i] = target[i];
  }
  if (p.validity == Validity::Free &&
      std::any_of(p.cells.begin(), p.cells.end(),
                  [](CellState s) { return s != CellState::Erased; })) {
    p.validity = Validity::Invalid;
  }

  ProgramOutcome out;
  auto touch = [&](std::uint32_t neighbour) {
    b.pages[neighbour].disturb_count += disturb;
    out.disturb_events += disturb;
  };
  if (addr.page > 0) touch(addr.page - 1);
  if (addr.page + 1 < geometry_.pages_per_block) touch(addr.page + 1);
  return out;
}

BitVector sense_states(std::span<const CellState> states) {
  BitVector bits(states.size() * kBitsPerCell);
  for (std::size_t c = 0; c < states.size(); ++c) {
    const int level = read_level(states[c]);
    bits.set(3 * c, (level & 4) != 0);
    bits.set(3 * c + 1, (level & 2) != 0);
    bits.set(3 * c + 2, (level & 1) != 0);
  }
  return bits;
}

BitVector Device::read_page(PageAddress addr) const {
  return sense_states(page(addr).cells);
}

BitVector Device::read_page(PageAddress addr, double ber, Rng& rng) const {
  BitVector bits = read_page(addr);
  if (ber <= 0.0) return bits;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (unit_interval(rng) < ber) bits.flip(i);
  }
  return bits;
}

PageBufferResult Device::sense_and_compare(PageAddress addr, std::size_t sector_index,
                                           const BitVector& reference_bits) const {
  check(addr);
  if (sector_index >= geometry_.sectors_per_page) {
    throw Error(ErrorCode::OutOfRange, "sector " + std::to_string(sector_index));
  }
  if (reference_bits.size() != geometry_.bits_per_sector) {
    throw Error(ErrorCode::LengthMismatch,
                "reference of " + std::to_string(reference_bits.size()) +
                    " bits for a " + std::to_string(geometry_.bits_per_sector) +
                    "-bit sector");
  }
  PageBufferResult r;
  r.sensed_bits = read_page(addr).slice(sector_index * geometry_.bits_per_sector,
                                        geometry_.bits_per_sector);
  r.xor_bits = r.sensed_bits ^ reference_bits;
  r.ones_count = r.xor_bits.popcount();
  return r;
}

CellHistogram Device::cell_count_histogram(PageAddress addr) const {
  CellHistogram h;
  for (CellState s : page(addr).cells) h.add(s);
  return h;
}

void Device::mark_valid(PageAddress addr, std::int64_t lpn) {
  PhysicalPage& p = mutable_page(addr);
  p.validity = Validity::Valid;
  p.logical_owner = lpn;
}

void Device::mark_invalid(PageAddress addr) {
  PhysicalPage& p = mutable_page(addr);
  // Owner is kept: stale pages still remember whose data they hold.
  p.validity = Validity::Invalid;
}

void Device::set_managed(std::uint32_t index, bool managed) {
  if (index >= blocks_.size()) {
    throw Error(ErrorCode::OutOfRange, "block " + std::to_string(index));
  }
  blocks_[index].managed = managed && !blocks_[index].bad;
}

void Device::mark_bad(std::uint32_t index) {
  if (index >= blocks_.size()) {
    throw Error(ErrorCode::OutOfRange, "block " + std::to_string(index));
  }
  blocks_[index].bad = true;
  blocks_[index].managed = false;
}

void Device::restore_block(std::uint32_t index, std::uint32_t pe_cycles, bool bad,
                           bool managed) {
  if (index >= blocks_.size()) {
    throw Error(ErrorCode::OutOfRange, "block " + std::to_string(index));
  }
  blocks_[index].pe_cycles = pe_cycles;
  blocks_[index].bad = bad;
  blocks_[index].managed = managed && !bad;
}

void Device::restore_page(PageAddress addr, PhysicalPage page) {
  if (page.cells.size() != geometry_.cells_per_page) {
    throw Error(ErrorCode::LengthMismatch, "restored page cell count");
  }
  mutable_page(addr) = std::move(page);
}

}  // namespace nandguard
