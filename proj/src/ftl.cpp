#include "nandguard/ftl.hpp"

#include <algorithm>
#include <cmath>

#include "nandguard/error.hpp"

namespace nandguard {

std::optional<PageAddress> MapTable::find(std::int64_t lpn) const {
  auto it = entries_.find(lpn);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(UnmanagedReason r) noexcept {
  switch (r) {
    case UnmanagedReason::GcRetired: return "GC_RETIRED";
    case UnmanagedReason::WearSwapped: return "WEAR_SWAPPED";
    case UnmanagedReason::Bad: return "BAD";
    case UnmanagedReason::OverProvision: return "OVER_PROVISION";
  }
  return "?";
}

bool UnmanagedSet::contains(std::uint32_t block) const noexcept {
  return reason(block).has_value();
}

std::optional<UnmanagedReason> UnmanagedSet::reason(std::uint32_t block) const noexcept {
  for (const auto& e : entries_) {
    if (e.block == block) return e.reason;
  }
  return std::nullopt;
}

void UnmanagedSet::add(std::uint32_t block, UnmanagedReason reason) {
  for (auto& e : entries_) {
    if (e.block == block) {
      e.reason = reason;
      return;
    }
  }
  entries_.push_back({block, reason});
}

void UnmanagedSet::remove(std::uint32_t block) {
  std::erase_if(entries_, [block](const UnmanagedEntry& e) { return e.block == block; });
}

std::string_view to_string(TrimMode m) noexcept {
  return m == TrimMode::Immediate ? "IMMEDIATE" : "DEFERRED";
}

void FtlConfig::validate() const {
  if (!(over_provision >= 0.0 && over_provision < 1.0)) {
    throw Error(ErrorCode::ConfigError, "over_provision must lie in [0, 1)");
  }
  if (!(deferred_trim_pressure > 0.0 && deferred_trim_pressure <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "deferred_trim_pressure must lie in (0, 1]");
  }
}

namespace {

std::int64_t capacity_for(const Geometry& g, const FtlConfig& c) {
  const auto reserved =
      static_cast<std::uint32_t>(std::floor(g.blocks_per_device * c.over_provision + 1e-9));
  const std::uint32_t usable = g.blocks_per_device > reserved ? g.blocks_per_device - reserved : 0;
  return static_cast<std::int64_t>(usable) * g.pages_per_block;
}

}  // namespace

Ftl::Ftl(Geometry geometry, CodecConfig codec, FtlConfig config)
    : device_(geometry), codec_(geometry, std::move(codec)), config_(config) {
  config_.validate();
  logical_capacity_ = capacity_for(geometry, config_);
  trim_.mode = config_.trim_mode;
}

Ftl::Ftl(Device device, CodecConfig codec, FtlConfig config, MapTable map,
         UnmanagedSet unmanaged, std::vector<TrimEntry> deferred_queue)
    : device_(std::move(device)),
      codec_(device_.geometry(), std::move(codec)),
      config_(config),
      map_(std::move(map)),
      unmanaged_(std::move(unmanaged)) {
  config_.validate();
  logical_capacity_ = capacity_for(device_.geometry(), config_);
  trim_.mode = config_.trim_mode;
  trim_.deferred_queue = std::move(deferred_queue);
  const auto problems = check_invariants();
  if (!problems.empty()) throw Error(ErrorCode::CorruptImage, problems.front());
}

// --- block classification ---------------------------------------------------

bool Ftl::in_service(std::uint32_t b) const {
  const Block& blk = device_.block(b);
  return blk.managed && !blk.bad && !unmanaged_.contains(b);
}

bool Ftl::is_free_block(std::uint32_t b) const {
  if (!in_service(b)) return false;
  const auto& pages = device_.block(b).pages;
  return std::all_of(pages.begin(), pages.end(),
                     [](const PhysicalPage& p) { return p.validity == Validity::Free; });
}

bool Ftl::is_open_block(std::uint32_t b) const {
  if (!in_service(b)) return false;
  const auto& pages = device_.block(b).pages;
  const auto free = std::count_if(pages.begin(), pages.end(), [](const PhysicalPage& p) {
    return p.validity == Validity::Free;
  });
  return free > 0 && static_cast<std::size_t>(free) < pages.size();
}

std::vector<std::uint32_t> Ftl::free_blocks(const BlockSet& excluded) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (!excluded.contains(b) && is_free_block(b)) out.push_back(b);
  }
  return out;
}

std::optional<std::uint32_t> Ftl::coolest_free_block(const BlockSet& excluded) const {
  std::optional<std::uint32_t> best;
  for (std::uint32_t b : free_blocks(excluded)) {
    if (!best || device_.block(b).pe_cycles < device_.block(*best).pe_cycles) best = b;
  }
  return best;
}

std::size_t Ftl::free_page_count() const {
  std::size_t n = 0;
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (!in_service(b)) continue;
    for (const auto& p : device_.block(b).pages) n += p.validity == Validity::Free ? 1 : 0;
  }
  return n;
}

// --- allocation -------------------------------------------------------------

void Ftl::retire_dead_blocks() {
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (!in_service(b)) continue;
    const auto& pages = device_.block(b).pages;
    const bool full_and_dead =
        std::none_of(pages.begin(), pages.end(), [](const PhysicalPage& p) {
          return p.validity == Validity::Free || p.validity == Validity::Valid;
        });
    if (full_and_dead) {
      device_.set_managed(b, false);
      unmanaged_.add(b, UnmanagedReason::OverProvision);
    }
  }
}

void Ftl::erase_and_account(std::uint32_t b) {
  const EraseOutcome e = device_.erase_block(b);
  std::erase_if(trim_.deferred_queue,
                [b](const TrimEntry& t) { return t.addr.block == b; });
  if (e.became_bad) {
    unmanaged_.add(b, UnmanagedReason::Bad);
  } else {
    unmanaged_.remove(b);
    device_.set_managed(b, true);
  }
}

bool Ftl::reclaim_one(const BlockSet& excluded) {
  for (const UnmanagedEntry& e : unmanaged_.entries()) {
    if (e.reason == UnmanagedReason::Bad || excluded.contains(e.block)) continue;
    if (device_.block(e.block).bad) continue;
    erase_and_account(e.block);
    return true;
  }
  return false;
}

PageAddress Ftl::allocate_page(const BlockSet& excluded) {
  const std::uint32_t blocks = device_.geometry().blocks_per_device;
  for (std::uint32_t attempt = 0; attempt < 4 * blocks + 4; ++attempt) {
    retire_dead_blocks();
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (excluded.contains(b) || !is_open_block(b)) continue;
      const auto& pages = device_.block(b).pages;
      for (std::uint32_t p = 0; p < pages.size(); ++p) {
        if (pages[p].validity == Validity::Free) return {b, p};
      }
    }
    const auto frees = free_blocks(excluded);
    // One free block stays in reserve as a GC destination.
    if (frees.size() >= 2) return {frees.front(), 0};
    if (reclaim_one(excluded)) continue;
    if (!select_victims(excluded).empty()) {
      try {
        collect(excluded);
        continue;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DeviceFull) throw;
      }
    }
    if (frees.size() == 1) return {frees.front(), 0};
    break;
  }
  throw Error(ErrorCode::DeviceFull, "no free page after garbage collection");
}

// --- host interface ---------------------------------------------------------

WriteOutcome Ftl::write_logical(std::int64_t lpn, std::string_view text) {
  if (text.find('\0') != std::string_view::npos) {
    throw Error(ErrorCode::ParameterError, "text may not contain NUL");
  }
  return write_logical_bits(lpn, encode_text(text));
}

WriteOutcome Ftl::write_logical_bits(std::int64_t lpn, const BitVector& payload) {
  if (lpn < 0 || lpn >= logical_capacity_) {
    throw Error(ErrorCode::OutOfRange,
                "lpn " + std::to_string(lpn) + " outside logical capacity " +
                    std::to_string(logical_capacity_));
  }
  if (payload.size() > codec_.capacity_bits()) {
    throw Error(ErrorCode::LengthMismatch, "payload exceeds page capacity");
  }
  const PageAddress dst = allocate_page({});
  // Allocation may have relocated the previous copy; look it up afterwards.
  const std::optional<PageAddress> previous = map_.find(lpn);
  const auto states = codec_.states_for(codec_.codeword(payload, device_.global_page_index(dst)));
  device_.program_page(dst, states, ProgramMode::Full);
  device_.mark_valid(dst, lpn);
  if (previous) device_.mark_invalid(*previous);
  map_.set(lpn, dst);
  maybe_flush_deferred();
  return {dst, previous};
}

ReadResult Ftl::read_logical(std::int64_t lpn, const ReadOptions& options) const {
  const auto addr = map_.find(lpn);
  if (!addr) throw Error(ErrorCode::Unmapped, "lpn " + std::to_string(lpn));
  const BitVector stored_raw = device_.read_page(*addr);
  BitVector raw = stored_raw;
  if (options.ber > 0.0) {
    if (options.rng == nullptr) {
      throw Error(ErrorCode::ParameterError, "read noise requires an rng");
    }
    raw = device_.read_page(*addr, options.ber, *options.rng);
  }
  for (std::size_t bit : options.flip_bits) raw.flip(bit);

  const BitVector stored = codec_.codeword_from_sensed(stored_raw);
  const BitVector sensed = codec_.codeword_from_sensed(raw);
  const std::size_t sector = device_.geometry().bits_per_sector;
  ReadResult out;
  out.addr = *addr;
  for (std::size_t s = 0; s < device_.geometry().sectors_per_page; ++s) {
    const DecodeResult d = ecc_decode(sensed.slice(s * sector, sector),
                                      stored.slice(s * sector, sector),
                                      codec_.config().ecc);
    out.corrections_used += d.corrections_used;
  }
  out.payload = codec_.payload_from_codeword(stored, device_.global_page_index(*addr));
  out.text = decode_text(out.payload);
  return out;
}

// --- garbage collection -----------------------------------------------------

std::vector<std::uint32_t> Ftl::select_victims(const BlockSet& excluded) const {
  struct Candidate {
    std::uint32_t block;
    std::size_t invalid;
    std::size_t valid;
  };
  std::vector<Candidate> candidates;
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (excluded.contains(b) || !in_service(b)) continue;
    Candidate c{b, 0, 0};
    bool has_free = false;
    for (const auto& p : device_.block(b).pages) {
      c.invalid += p.validity == Validity::Invalid ? 1 : 0;
      c.valid += p.validity == Validity::Valid ? 1 : 0;
      has_free = has_free || p.validity == Validity::Free;
    }
    if (!has_free && c.invalid > 0) candidates.push_back(c);
  }
  // Greedy: most invalid pages first, ties to the lowest index.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.invalid > b.invalid; });
  std::vector<std::uint32_t> victims;
  std::size_t carried = 0;
  for (const auto& c : candidates) {
    if (carried + c.valid > device_.geometry().pages_per_block) continue;
    carried += c.valid;
    victims.push_back(c.block);
  }
  return victims;
}

void Ftl::relocate(PageAddress from, PageAddress to) {
  const PhysicalPage& src = device_.page(from);
  const std::int64_t lpn = src.logical_owner.value();
  const BitVector codeword = codec_.codeword_from_sensed(device_.read_page(from));
  const BitVector payload =
      codec_.payload_from_codeword(codeword, device_.global_page_index(from));
  const auto states = codec_.states_for(codec_.codeword(payload, device_.global_page_index(to)));
  device_.program_page(to, states, ProgramMode::Full);
  device_.mark_valid(to, lpn);
  device_.mark_invalid(from);
  map_.set(lpn, to);
}

GcReport Ftl::collect(const BlockSet& excluded) {
  GcReport report;
  report.victims = select_victims(excluded);
  if (report.victims.empty()) {
    throw Error(ErrorCode::NothingToCollect, "no block holds invalid pages");
  }
  std::size_t carried = 0;
  for (std::uint32_t b : report.victims) {
    for (const auto& p : device_.block(b).pages) carried += p.validity == Validity::Valid ? 1 : 0;
  }
  if (carried > 0) {
    BlockSet off_limits = excluded;
    off_limits.insert(report.victims.begin(), report.victims.end());
    auto dest = coolest_free_block(off_limits);
    if (!dest && reclaim_one(off_limits)) dest = coolest_free_block(off_limits);
    if (!dest) throw Error(ErrorCode::DeviceFull, "no free block for garbage collection");
    report.destination = dest;
    std::uint32_t next = 0;
    for (std::uint32_t b : report.victims) {
      for (std::uint32_t p = 0; p < device_.geometry().pages_per_block; ++p) {
        if (device_.page({b, p}).validity != Validity::Valid) continue;
        relocate({b, p}, {*dest, next++});
        ++report.pages_moved;
      }
    }
  }
  // Victims keep their states: they become the residual OP area.
  for (std::uint32_t b : report.victims) {
    device_.set_managed(b, false);
    unmanaged_.add(b, UnmanagedReason::GcRetired);
  }
  return report;
}

GcReport Ftl::garbage_collect() { return collect({}); }

// --- wear leveling ----------------------------------------------------------

WearLevelReport Ftl::wear_level(std::uint32_t threshold_delta) {
  WearLevelReport report;
  BlockSet handled;
  const std::uint32_t blocks = device_.geometry().blocks_per_device;
  while (true) {
    const auto dest = coolest_free_block(handled);
    if (!dest) break;
    const std::uint64_t floor_pe = device_.block(*dest).pe_cycles;
    std::optional<std::uint32_t> hot;
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (handled.contains(b) || !in_service(b) || is_free_block(b)) continue;
      const std::uint64_t pe = device_.block(b).pe_cycles;
      if (pe <= floor_pe + threshold_delta) continue;
      if (!hot || pe > device_.block(*hot).pe_cycles) hot = b;
    }
    if (!hot) break;

    WearMigration m{*hot, *dest, 0, false};
    std::uint32_t next = 0;
    for (std::uint32_t p = 0; p < device_.geometry().pages_per_block; ++p) {
      if (device_.page({*hot, p}).validity != Validity::Valid) continue;
      relocate({*hot, p}, {*dest, next++});
      ++m.pages_moved;
    }
    handled.insert(*hot);
    handled.insert(*dest);
    const auto& hot_pages = device_.block(*hot).pages;
    const bool holds_data = std::any_of(hot_pages.begin(), hot_pages.end(), [](const auto& p) {
      return p.validity != Validity::Free;
    });
    if (config_.wear_defer_erase && holds_data) {
      device_.set_managed(*hot, false);
      unmanaged_.add(*hot, UnmanagedReason::WearSwapped);
    } else {
      erase_and_account(*hot);
      m.source_erased = true;
    }
    report.migrations.push_back(m);
  }
  return report;
}

// --- TRIM -------------------------------------------------------------------

std::size_t Ftl::purge_block(std::uint32_t b, TrimReport& report) {
  if (device_.block(b).bad) return 0;
  std::size_t moved = 0;
  for (std::uint32_t p = 0; p < device_.geometry().pages_per_block; ++p) {
    if (device_.page({b, p}).validity != Validity::Valid) continue;
    relocate({b, p}, allocate_page({b}));
    ++moved;
  }
  erase_and_account(b);
  report.erased_blocks.push_back(b);
  report.relocated_pages += moved;
  ++report.extra_pe_cycles;
  return moved;
}

TrimReport Ftl::trim(std::span<const std::int64_t> lpns) { return trim(lpns, trim_.mode); }

TrimReport Ftl::trim(std::span<const std::int64_t> lpns, TrimMode mode) {
  for (std::int64_t lpn : lpns) {
    if (!map_.find(lpn)) throw Error(ErrorCode::Unmapped, "lpn " + std::to_string(lpn));
  }
  TrimReport report;
  BlockSet targets;
  for (std::int64_t lpn : lpns) {
    const auto addr = map_.find(lpn);
    if (!addr) continue;  // duplicate in the request
    map_.erase(lpn);
    device_.mark_invalid(*addr);
    report.trimmed.push_back(lpn);
    if (mode == TrimMode::Deferred) {
      trim_.deferred_queue.push_back({lpn, *addr});
      ++report.queued;
      continue;
    }
    // Immediate: every block holding this lpn's current or stale copies.
    for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
      for (const auto& p : device_.block(b).pages) {
        if (p.validity == Validity::Invalid && p.logical_owner == lpn) targets.insert(b);
      }
    }
  }
  for (std::uint32_t b : targets) purge_block(b, report);
  if (mode == TrimMode::Deferred) maybe_flush_deferred();
  return report;
}

TrimReport Ftl::run_deferred_queue() {
  TrimReport report;
  BlockSet targets;
  for (const TrimEntry& t : trim_.deferred_queue) {
    const PhysicalPage& p = device_.page(t.addr);
    if (p.validity == Validity::Invalid && p.logical_owner == t.lpn) targets.insert(t.addr.block);
  }
  trim_.deferred_queue.clear();
  for (std::uint32_t b : targets) purge_block(b, report);
  return report;
}

TrimReport Ftl::flush_deferred_trim() { return run_deferred_queue(); }

void Ftl::maybe_flush_deferred() {
  if (trim_.deferred_queue.empty()) return;
  std::size_t total = 0;
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (!device_.block(b).bad) total += device_.geometry().pages_per_block;
  }
  std::size_t used = 0;
  for (std::uint32_t b = 0; b < device_.geometry().blocks_per_device; ++b) {
    if (device_.block(b).bad) continue;
    for (const auto& p : device_.block(b).pages) used += p.validity != Validity::Free ? 1 : 0;
  }
  if (total > 0 && static_cast<double>(used) > config_.deferred_trim_pressure * total) {
    run_deferred_queue();
  }
}

void Ftl::release_physical(PageAddress addr) {
  const PhysicalPage& p = device_.page(addr);
  if (p.validity != Validity::Valid) return;
  if (p.logical_owner) map_.erase(*p.logical_owner);
  device_.mark_invalid(addr);
}

// --- invariants -------------------------------------------------------------

std::vector<std::string> Ftl::check_invariants() const {
  std::vector<std::string> problems;
  const Geometry& g = device_.geometry();
  std::set<PageAddress> targets;
  for (const auto& [lpn, addr] : map_.entries()) {
    if (addr.block >= g.blocks_per_device || addr.page >= g.pages_per_block) {
      problems.push_back("lpn " + std::to_string(lpn) + " maps outside the device");
      continue;
    }
    if (!targets.insert(addr).second) {
      problems.push_back("map is not injective at " + to_string(addr));
    }
    const PhysicalPage& p = device_.page(addr);
    if (p.validity != Validity::Valid || p.logical_owner != lpn) {
      problems.push_back("lpn " + std::to_string(lpn) + " maps to a page it does not own");
    }
    if (unmanaged_.contains(addr.block)) {
      problems.push_back("lpn " + std::to_string(lpn) + " maps into an unmanaged block");
    }
  }
  std::size_t valid = 0;
  for (std::uint32_t b = 0; b < g.blocks_per_device; ++b) {
    const Block& blk = device_.block(b);
    if (blk.bad && blk.managed) problems.push_back("bad block " + std::to_string(b) + " is managed");
    if (blk.managed == unmanaged_.contains(b)) {
      problems.push_back("block " + std::to_string(b) + " managed flag disagrees with unmanaged set");
    }
    for (std::uint32_t p = 0; p < blk.pages.size(); ++p) {
      const PhysicalPage& page = blk.pages[p];
      valid += page.validity == Validity::Valid ? 1 : 0;
      const bool erased = std::all_of(page.cells.begin(), page.cells.end(),
                                      [](CellState s) { return s == CellState::Erased; });
      const bool free = page.validity == Validity::Free;
      if (free != (erased && !page.logical_owner)) {
        problems.push_back("page " + to_string(PageAddress{b, p}) + " FREE flag disagrees with cells");
      }
    }
  }
  if (valid != map_.size()) {
    problems.push_back("VALID page count " + std::to_string(valid) + " != map size " +
                       std::to_string(map_.size()));
  }
  for (const UnmanagedEntry& e : unmanaged_.entries()) {
    if (e.block >= g.blocks_per_device) problems.push_back("unmanaged block out of range");
  }
  return problems;
}

}  // namespace nandguard
