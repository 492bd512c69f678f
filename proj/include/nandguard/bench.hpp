#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nandguard/ftl.hpp"
#include "nandguard/sanitize.hpp"

namespace nandguard {

struct BenchmarkWorkload {
  std::size_t pages = 100;
  std::uint64_t seed = 1;
  // One pulse so the deletion pulse disturbs exactly as much as down-bit.
  unsigned pulses = 1;
};

struct SchemeBenchmark {
  SanitizeScheme scheme = SanitizeScheme::Scrub;
  SanitizeMetrics totals;
  std::size_t pages = 0;
  std::size_t xor_pass_pages = 0;
  std::size_t distribution_pass_pages = 0;
  // What the scheme writes into the cells: "fixed-level", "random",
  // "single-level" or "none".
  std::string data_generation;
  // Whether a device could report P/F for it over valid and invalid areas.
  std::string native_reporting;
};

struct BenchmarkTable {
  std::size_t pages = 0;
  std::size_t cells_per_page = 0;
  std::vector<SchemeBenchmark> rows;
};

inline constexpr SanitizeScheme kAllSchemes[] = {
    SanitizeScheme::Scrub, SanitizeScheme::PartialOverwrite, SanitizeScheme::DownBit,
    SanitizeScheme::DeletionPulse};

// Fills a copy of the template with `workload.pages` seeded records, then
// sanitizes every one of them under each scheme on a fresh copy.
// Throws ParameterError if the template cannot hold the workload.
BenchmarkTable benchmark_schemes(const Ftl& device_template, const BenchmarkWorkload& workload,
                                 std::span<const SanitizeScheme> schemes = kAllSchemes);

}  // namespace nandguard
