#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nandguard/codec.hpp"
#include "nandguard/device.hpp"

namespace nandguard {

// Logical page number -> physical page. Injective; every target is VALID and
// owned by its logical page.
class MapTable {
 public:
  std::optional<PageAddress> find(std::int64_t lpn) const;
  void set(std::int64_t lpn, PageAddress addr) { entries_[lpn] = addr; }
  void erase(std::int64_t lpn) { entries_.erase(lpn); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::int64_t, PageAddress>& entries() const noexcept { return entries_; }

  friend bool operator==(const MapTable&, const MapTable&) = default;

 private:
  std::map<std::int64_t, PageAddress> entries_;
};

enum class UnmanagedReason : std::uint8_t {
  GcRetired = 0,
  WearSwapped = 1,
  Bad = 2,
  OverProvision = 3,
};

std::string_view to_string(UnmanagedReason r) noexcept;

struct UnmanagedEntry {
  std::uint32_t block = 0;
  UnmanagedReason reason = UnmanagedReason::GcRetired;

  friend bool operator==(const UnmanagedEntry&, const UnmanagedEntry&) = default;
};

// Blocks the host cannot reach. Insertion order is the rotation order used
// when retired blocks are erased on demand.
class UnmanagedSet {
 public:
  bool contains(std::uint32_t block) const noexcept;
  std::optional<UnmanagedReason> reason(std::uint32_t block) const noexcept;
  // Re-adding a member updates its reason in place.
  void add(std::uint32_t block, UnmanagedReason reason);
  void remove(std::uint32_t block);
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<UnmanagedEntry>& entries() const noexcept { return entries_; }

  friend bool operator==(const UnmanagedSet&, const UnmanagedSet&) = default;

 private:
  std::vector<UnmanagedEntry> entries_;
};

enum class TrimMode : std::uint8_t { Deferred = 0, Immediate = 1 };

std::string_view to_string(TrimMode m) noexcept;

struct TrimEntry {
  std::int64_t lpn = 0;
  PageAddress addr;

  friend bool operator==(const TrimEntry&, const TrimEntry&) = default;
};

struct TrimPolicy {
  TrimMode mode = TrimMode::Deferred;
  std::vector<TrimEntry> deferred_queue;

  friend bool operator==(const TrimPolicy&, const TrimPolicy&) = default;
};

struct FtlConfig {
  // Fraction of blocks withheld from logical capacity.
  double over_provision = 0.25;
  TrimMode trim_mode = TrimMode::Deferred;
  // Keep wear-levelled source blocks unerased (as WEAR_SWAPPED residue).
  bool wear_defer_erase = false;
  // Deferred TRIM runs once the used fraction of pages exceeds this.
  double deferred_trim_pressure = 0.9;

  void validate() const;

  friend bool operator==(const FtlConfig&, const FtlConfig&) = default;
};

struct WriteOutcome {
  PageAddress addr;
  std::optional<PageAddress> previous;
};

struct ReadOptions {
  double ber = 0.0;
  Rng* rng = nullptr;
  // Raw page bit positions flipped after sensing (fault injection).
  std::vector<std::size_t> flip_bits;
};

struct ReadResult {
  std::string text;
  BitVector payload;
  PageAddress addr;
  std::size_t corrections_used = 0;
};

struct GcReport {
  std::vector<std::uint32_t> victims;
  std::optional<std::uint32_t> destination;
  std::size_t pages_moved = 0;
};

struct WearMigration {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::size_t pages_moved = 0;
  bool source_erased = false;
};

struct WearLevelReport {
  std::vector<WearMigration> migrations;
};

struct TrimReport {
  std::vector<std::int64_t> trimmed;
  std::vector<std::uint32_t> erased_blocks;
  std::size_t relocated_pages = 0;
  std::size_t extra_pe_cycles = 0;
  std::size_t queued = 0;
};

// Page-mapped flash translation layer with out-of-place updates. GC victims
// are retired unerased into the unmanaged set and only erased when free
// blocks run short.
class Ftl {
 public:
  explicit Ftl(Geometry geometry = {}, CodecConfig codec = {}, FtlConfig config = {});
  // Reassembles persisted state; throws CorruptImage if it is inconsistent.
  Ftl(Device device, CodecConfig codec, FtlConfig config, MapTable map,
      UnmanagedSet unmanaged, std::vector<TrimEntry> deferred_queue);

  const Device& device() const noexcept { return device_; }
  // Physical access for sanitizers and fault injection. Callers that
  // overwrite a VALID page must release_physical() it first.
  Device& device() noexcept { return device_; }
  const PageCodec& codec() const noexcept { return codec_; }
  const FtlConfig& config() const noexcept { return config_; }
  const MapTable& map() const noexcept { return map_; }
  const UnmanagedSet& unmanaged() const noexcept { return unmanaged_; }
  const TrimPolicy& trim_policy() const noexcept { return trim_; }

  std::int64_t logical_capacity() const noexcept { return logical_capacity_; }
  std::size_t free_page_count() const;

  WriteOutcome write_logical(std::int64_t lpn, std::string_view text);
  WriteOutcome write_logical_bits(std::int64_t lpn, const BitVector& payload);
  ReadResult read_logical(std::int64_t lpn, const ReadOptions& options = {}) const;

  GcReport garbage_collect();
  WearLevelReport wear_level(std::uint32_t threshold_delta);
  TrimReport trim(std::span<const std::int64_t> lpns);
  TrimReport trim(std::span<const std::int64_t> lpns, TrimMode mode);
  // Executes every queued deferred TRIM now, regardless of pressure.
  TrimReport flush_deferred_trim();

  // Drops the mapping of a VALID page so it can be overwritten physically.
  // No-op for pages that are not VALID.
  void release_physical(PageAddress addr);

  // Human-readable descriptions of every violated invariant; empty if none.
  std::vector<std::string> check_invariants() const;

  friend bool operator==(const Ftl&, const Ftl&) = default;

 private:
  using BlockSet = std::set<std::uint32_t>;

  bool is_free_block(std::uint32_t b) const;
  bool is_open_block(std::uint32_t b) const;
  bool in_service(std::uint32_t b) const;
  std::vector<std::uint32_t> free_blocks(const BlockSet& excluded) const;
  std::optional<std::uint32_t> coolest_free_block(const BlockSet& excluded) const;

  PageAddress allocate_page(const BlockSet& excluded);
  void retire_dead_blocks();
  bool reclaim_one(const BlockSet& excluded);
  std::vector<std::uint32_t> select_victims(const BlockSet& excluded) const;
  GcReport collect(const BlockSet& excluded);
  void relocate(PageAddress from, PageAddress to);
  std::size_t purge_block(std::uint32_t b, TrimReport& report);
  void erase_and_account(std::uint32_t b);
  void maybe_flush_deferred();
  TrimReport run_deferred_queue();

  Device device_;
  PageCodec codec_;
  FtlConfig config_;
  std::int64_t logical_capacity_ = 0;
  MapTable map_;
  UnmanagedSet unmanaged_;
  TrimPolicy trim_;
};

}  // namespace nandguard
