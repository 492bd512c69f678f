#include "nandguard/bench.hpp"

#include "nandguard/random.hpp"
#include "nandguard/verify.hpp"

namespace nandguard {

namespace {

std::string random_text(Rng& rng, std::size_t max_chars) {
  const std::size_t len = 8 + uniform_below(rng, std::min<std::size_t>(max_chars, 40) - 7);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('!' + uniform_below(rng, 94)));
  return s;
}

const char* data_generation_of(SanitizeScheme s) {
  switch (s) {
    case SanitizeScheme::Scrub: return "fixed-level";
    case SanitizeScheme::PartialOverwrite: return "random";
    case SanitizeScheme::DownBit: return "single-level";
    case SanitizeScheme::DeletionPulse: return "none";
  }
  return "none";
}

// Scrub and pulse leave nothing a controller could compare against in the
// valid area; the data-writing schemes can be checked there.
const char* native_reporting_of(SanitizeScheme s) {
  switch (s) {
    case SanitizeScheme::PartialOverwrite:
    case SanitizeScheme::DownBit: return "possible (valid area)";
    default: return "none";
  }
}

}  // namespace

BenchmarkTable benchmark_schemes(const Ftl& device_template, const BenchmarkWorkload& workload,
                                 std::span<const SanitizeScheme> schemes) {
  if (workload.pages == 0 ||
      static_cast<std::int64_t>(workload.pages) > device_template.logical_capacity()) {
    throw Error(ErrorCode::ParameterError, "workload of " + std::to_string(workload.pages) +
                                               " pages does not fit the device");
  }
  if (workload.pulses == 0) throw Error(ErrorCode::ParameterError, "pulses must be >= 1");

  Ftl loaded = device_template;
  Rng rng(workload.seed);
  std::vector<PageAddress> targets;
  std::vector<BitVector> references;
  const std::size_t cap = loaded.codec().capacity_chars();
  for (std::size_t i = 0; i < workload.pages; ++i) {
    const std::string text = random_text(rng, cap);
    const auto lpn = static_cast<std::int64_t>(i);
    const PageAddress addr = loaded.write_logical(lpn, text).addr;
    targets.push_back(addr);
    references.push_back(loaded.codec().sensed_reference(
        encode_text(text), loaded.device().global_page_index(addr)));
  }
  const EccConfig& ecc = loaded.codec().config().ecc;

  BenchmarkTable table;
  table.pages = workload.pages;
  table.cells_per_page = loaded.device().geometry().cells_per_page;
  for (SanitizeScheme scheme : schemes) {
    Ftl run = loaded;
    SchemeBenchmark row;
    row.scheme = scheme;
    row.pages = workload.pages;
    row.data_generation = data_generation_of(scheme);
    row.native_reporting = native_reporting_of(scheme);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      run.release_physical(targets[i]);
      SanitizeParams params{workload.pulses, workload.seed + i};
      row.totals += sanitize(run.device(), targets[i], scheme, params);
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (xor_verify_page(run.device(), targets[i], references[i], ecc).overall == Verdict::Pass) {
        ++row.xor_pass_pages;
      }
      if (distribution_verify(run.device(), targets[i]).overall == Verdict::Pass) {
        ++row.distribution_pass_pages;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace nandguard
