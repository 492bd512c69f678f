#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "nandguard/device.hpp"

namespace nandguard {

enum class SanitizeScheme : std::uint8_t {
  Scrub,
  PartialOverwrite,
  DownBit,
  DeletionPulse,
};

std::string_view to_string(SanitizeScheme s) noexcept;
// Accepts "scrub", "partial" / "partial_overwrite", "downbit" / "down_bit",
// "pulse" / "deletion_pulse" (case-insensitive).
std::optional<SanitizeScheme> parse_sanitize_scheme(std::string_view text) noexcept;

struct SanitizeParams {
  unsigned pulses = 7;
  std::uint64_t rng_seed = 0;
};

struct SanitizeMetrics {
  std::uint64_t generated_bits = 0;
  std::uint64_t wear_delta = 0;
  std::uint64_t disturb_events = 0;
  std::uint64_t duration_units = 0;

  SanitizeMetrics& operator+=(const SanitizeMetrics& o) {
    generated_bits += o.generated_bits;
    wear_delta += o.wear_delta;
    disturb_events += o.disturb_events;
    duration_units += o.duration_units;
    return *this;
  }
  friend bool operator==(const SanitizeMetrics&, const SanitizeMetrics&) = default;
};

// Each scheme only ever raises cell levels and leaves the page INVALID.
// They operate on the physical page whatever its validity; releasing a
// mapped page is the caller's job (Ftl::release_physical).

// Every cell to P7. The only scheme that costs cell wear.
SanitizeMetrics scrub(Device& device, PageAddress addr);

// Every cell to a seeded uniform level in [current, P7].
SanitizeMetrics partial_overwrite(Device& device, PageAddress addr, std::uint64_t rng_seed);

// Collapses to single-level granularity: cells below P4 rise to P4.
SanitizeMetrics down_bit_program(Device& device, PageAddress addr);

// Raises each cell by `pulses` levels, saturating at P7. No data is loaded.
SanitizeMetrics deletion_pulse(Device& device, PageAddress addr, unsigned pulses);

SanitizeMetrics sanitize(Device& device, PageAddress addr, SanitizeScheme scheme,
                         const SanitizeParams& params = {});

}  // namespace nandguard
