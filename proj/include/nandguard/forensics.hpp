#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nandguard/ftl.hpp"

namespace nandguard {

// What the adversary knows. Physical access is always total; the flags only
// decide which locations are examined first.
struct AttackerContext {
  bool has_map_table = true;
  bool has_bad_block_list = true;
  // Correction radius assumed by the attacker; defaults to the device's t.
  std::optional<std::size_t> ecc_capability_known;
};

struct BlockDump {
  std::uint32_t block = 0;
  UnmanagedReason reason = UnmanagedReason::GcRetired;
  std::uint32_t pe_cycles = 0;
  std::vector<std::vector<CellState>> pages;
};

// Raw cell states of every unmanaged block (bad blocks included). Read-only.
std::vector<BlockDump> dump_unmanaged(const Ftl& ftl);

// One line per page: "<block>:<page> <one hex digit per cell>".
std::string dump_to_hex(const BlockDump& dump);

struct Recovery {
  PageAddress location;
  std::size_t distance = 0;
  std::vector<std::size_t> sector_distances;
  // ECC-corrected result, i.e. the target itself.
  std::string recovered_text;
  // Descrambled bytes before correction, truncated to the target length.
  std::string raw_text;
  Validity validity = Validity::Invalid;
  bool unmanaged = false;
};

// Unmaps and descrambles every page outside the host's view (unmanaged or
// bad blocks, INVALID pages anywhere) and reports each one within the
// correction radius of the target.
std::vector<Recovery> recover(const Ftl& ftl, std::string_view target_text,
                              const AttackerContext& context = {});

}  // namespace nandguard
