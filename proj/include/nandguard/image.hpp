#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nandguard/ftl.hpp"

namespace nandguard {

// Flash image, all integers little-endian:
//
//   "NGT1"
//   u32 blocks_per_device, pages_per_block, cells_per_page,
//       sectors_per_page, bits_per_sector, endurance_limit
//   per block:  u32 pe_cycles, u8 flags (bit0 bad, bit1 managed)
//     per page: u8 validity, i64 logical_owner (-1 = none), u32 disturb,
//               ceil(cells/2) bytes of 4-bit state codes, high nibble first,
//               ERASED = 0xF, P0..P7 = 0..7, odd tail padded with 0xF
//   appendix:
//     u32 n, n x {i64 lpn, u32 block, u32 page}        map table
//     u32 n, n x {u32 block, u8 reason}                unmanaged set, rotation order
//     u32 n, n x {i64 lpn, u32 block, u32 page}        deferred TRIM queue
//     u16 seed_base, u16 tap_mask, u8[8] mapping, u32 ecc_t,
//     u8 trim_mode, u8 wear_defer_erase, f64 over_provision,
//     f64 deferred_trim_pressure
inline constexpr char kImageMagic[4] = {'N', 'G', 'T', '1'};

std::vector<std::uint8_t> serialize_image(const Ftl& ftl);
// Throws CorruptImage (bad magic, truncation, inconsistent content) or
// VersionMismatch (a different NGT format revision).
Ftl parse_image(std::span<const std::uint8_t> bytes);

void image_save(const Ftl& ftl, const std::filesystem::path& path);
Ftl image_load(const std::filesystem::path& path);

// FNV-1a over the serialized image.
std::uint64_t state_hash(const Ftl& ftl);

}  // namespace nandguard
