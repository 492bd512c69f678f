#include "nandguard/sanitize.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "nandguard/error.hpp"
#include "nandguard/random.hpp"

namespace nandguard {

std::string_view to_string(SanitizeScheme s) noexcept {
  switch (s) {
    case SanitizeScheme::Scrub: return "SCRUB";
    case SanitizeScheme::PartialOverwrite: return "PARTIAL_OVERWRITE";
    case SanitizeScheme::DownBit: return "DOWN_BIT";
    case SanitizeScheme::DeletionPulse: return "DELETION_PULSE";
  }
  return "?";
}

std::optional<SanitizeScheme> parse_sanitize_scheme(std::string_view text) noexcept {
  std::string key;
  for (char c : text) {
    if (c == '-' || c == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "scrub") return SanitizeScheme::Scrub;
  if (key == "partial" || key == "partialoverwrite") return SanitizeScheme::PartialOverwrite;
  if (key == "downbit") return SanitizeScheme::DownBit;
  if (key == "pulse" || key == "deletionpulse") return SanitizeScheme::DeletionPulse;
  return std::nullopt;
}

namespace {

const PhysicalPage& usable_page(const Device& device, PageAddress addr) {
  const PhysicalPage& p = device.page(addr);
  if (device.block(addr.block).bad) {
    throw Error(ErrorCode::BadBlock, "sanitize of page " + to_string(addr));
  }
  return p;
}

SanitizeMetrics apply(Device& device, PageAddress addr, const std::vector<CellState>& target,
                      unsigned disturb) {
  SanitizeMetrics m;
  m.disturb_events =
      device.program_page(addr, target, ProgramMode::PartialOverwrite, disturb).disturb_events;
  device.mark_invalid(addr);
  return m;
}

}  // namespace

SanitizeMetrics scrub(Device& device, PageAddress addr) {
  const PhysicalPage& p = usable_page(device, addr);
  const std::vector<CellState> target(p.cells.size(), CellState::P7);
  SanitizeMetrics m = apply(device, addr, target, disturb_weight::kScrub);
  m.generated_bits = target.size();
  m.wear_delta = 1;
  m.duration_units = 2;  // data generation + one program
  return m;
}

SanitizeMetrics partial_overwrite(Device& device, PageAddress addr, std::uint64_t rng_seed) {
  const PhysicalPage& p = usable_page(device, addr);
  Rng rng(rng_seed);
  std::vector<CellState> target;
  target.reserve(p.cells.size());
  for (CellState current : p.cells) {
    const int low = read_level(current);
    const int level = low + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(8 - low)));
    // An erased cell may also stay at P0, which is still a raise.
    target.push_back(programmed_level(level));
  }
  SanitizeMetrics m = apply(device, addr, target, disturb_weight::kPartialOverwrite);
  m.generated_bits = kBitsPerCell * target.size();
  m.duration_units = 2;
  return m;
}

SanitizeMetrics down_bit_program(Device& device, PageAddress addr) {
  const PhysicalPage& p = usable_page(device, addr);
  std::vector<CellState> target;
  target.reserve(p.cells.size());
  for (CellState current : p.cells) {
    target.push_back(rank(current) < rank(CellState::P4) ? CellState::P4 : current);
  }
  SanitizeMetrics m = apply(device, addr, target, disturb_weight::kDownBit);
  m.generated_bits = target.size();
  m.duration_units = 2;
  return m;
}

SanitizeMetrics deletion_pulse(Device& device, PageAddress addr, unsigned pulses) {
  if (pulses == 0) throw Error(ErrorCode::ParameterError, "deletion pulse needs pulses >= 1");
  const PhysicalPage& p = usable_page(device, addr);
  std::vector<CellState> target;
  target.reserve(p.cells.size());
  for (CellState current : p.cells) {
    const int raised = std::min<int>(rank(current) + static_cast<int>(std::min(pulses, 8u)),
                                     rank(CellState::P7));
    target.push_back(from_rank(raised));
  }
  SanitizeMetrics m = apply(device, addr, target, disturb_weight::kDeletionPulse * pulses);
  m.duration_units = pulses;
  return m;
}

SanitizeMetrics sanitize(Device& device, PageAddress addr, SanitizeScheme scheme,
                         const SanitizeParams& params) {
  switch (scheme) {
    case SanitizeScheme::Scrub: return scrub(device, addr);
    case SanitizeScheme::PartialOverwrite: return partial_overwrite(device, addr, params.rng_seed);
    case SanitizeScheme::DownBit: return down_bit_program(device, addr);
    case SanitizeScheme::DeletionPulse: return deletion_pulse(device, addr, params.pulses);
  }
  throw Error(ErrorCode::ParameterError, "unknown sanitize scheme");
}

}  // namespace nandguard
