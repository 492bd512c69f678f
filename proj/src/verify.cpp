#include "nandguard/verify.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace nandguard {

std::string_view to_string(Verdict v) noexcept { return v == Verdict::Pass ? "PASS" : "FAIL"; }

std::string_view to_string(VerifyMethod m) noexcept {
  return m == VerifyMethod::Distribution ? "DISTRIBUTION" : "XOR_COUNT";
}

std::optional<VerifyMethod> parse_verify_method(std::string_view text) noexcept {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "xor" || key == "xor_count") return VerifyMethod::XorCount;
  if (key == "distribution" || key == "dist") return VerifyMethod::Distribution;
  return std::nullopt;
}

SectorVerdict xor_verify_sector(const Device& device, PageAddress addr, std::size_t sector_index,
                                const BitVector& reference_bits, const EccConfig& ecc,
                                std::optional<std::size_t> threshold) {
  const PageBufferResult r = device.sense_and_compare(addr, sector_index, reference_bits);
  SectorVerdict v;
  v.sector_index = sector_index;
  v.ones_count = r.ones_count;
  v.threshold = threshold.value_or(ecc.t);
  v.verdict = verdict_for(v.ones_count, v.threshold);
  return v;
}

VerificationReport xor_verify_page(const Device& device, PageAddress addr,
                                   const BitVector& reference_page_bits, const EccConfig& ecc,
                                   std::optional<std::size_t> threshold) {
  const Geometry& g = device.geometry();
  if (reference_page_bits.size() != g.sector_bits_per_page()) {
    throw Error(ErrorCode::LengthMismatch,
                "page reference of " + std::to_string(reference_page_bits.size()) +
                    " bits, expected " + std::to_string(g.sector_bits_per_page()));
  }
  VerificationReport report;
  report.page = addr;
  report.method = VerifyMethod::XorCount;
  report.overall = Verdict::Pass;
  for (std::size_t s = 0; s < g.sectors_per_page; ++s) {
    const BitVector sector = reference_page_bits.slice(s * g.bits_per_sector, g.bits_per_sector);
    report.per_sector.push_back(xor_verify_sector(device, addr, s, sector, ecc, threshold));
    if (report.per_sector.back().verdict == Verdict::Fail) report.overall = Verdict::Fail;
  }
  return report;
}

double chi_square_uniform(const CellHistogram& histogram) {
  const auto counts = histogram.readable();
  const double expected = static_cast<double>(histogram.total()) / kProgrammedLevels;
  if (expected <= 0.0) return 0.0;
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

VerificationReport distribution_verify(const Device& device, PageAddress addr,
                                       double uniformity_threshold) {
  VerificationReport report;
  report.page = addr;
  report.method = VerifyMethod::Distribution;
  report.histogram = device.cell_count_histogram(addr);
  report.chi_square = chi_square_uniform(*report.histogram);
  report.uniformity_threshold = uniformity_threshold;
  report.overall = *report.chi_square > uniformity_threshold ? Verdict::Pass : Verdict::Fail;
  return report;
}

std::vector<ScanHit> antiforensic_scan(const Device& device, const PageCodec& codec,
                                       std::string_view personal_data, const EccConfig& ecc) {
  const BitVector payload = encode_text(personal_data);
  std::vector<ScanHit> hits;
  if (payload.empty() || payload.size() > codec.capacity_bits()) return hits;
  const Geometry& g = device.geometry();
  const std::size_t sectors = codec.content_sectors(payload.size());
  const std::vector<std::size_t> evidence = codec.evidence_sectors(payload.size());
  const std::size_t span = sectors * g.bits_per_sector;
  for (std::size_t index = 0; index < g.page_count(); ++index) {
    const PageAddress addr = device.address_of(index);
    const BitVector sensed = device.read_page(addr).slice(0, span);
    const BitVector expected = codec.sensed_reference(payload, index).slice(0, span);
    ScanHit hit;
    hit.addr = addr;
    hit.sector_distances = sector_distances(sensed, expected, g.bits_per_sector);
    hit.min_distance = min_over(hit.sector_distances, evidence);
    if (!ecc_correctable(hit.min_distance, ecc)) continue;
    hit.validity = device.page(addr).validity;
    hits.push_back(std::move(hit));
  }
  return hits;
}

ExhaustedRoundsError::ExhaustedRoundsError(RetryOutcome outcome)
    : Error(ErrorCode::ExhaustedRounds,
            "page " + to_string(outcome.final_report.page) + " still FAIL after " +
                std::to_string(outcome.rounds_used) + " rounds"),
      outcome_(std::move(outcome)) {}

RetryOutcome verify_and_retry(Device& device, PageAddress addr, const BitVector& reference,
                              std::span<const SanitizeStep> steps, const EccConfig& ecc,
                              std::size_t max_rounds, const VerifyOptions& options) {
  if (steps.empty()) throw Error(ErrorCode::ParameterError, "empty scheme sequence");
  if (max_rounds == 0) throw Error(ErrorCode::ParameterError, "max_rounds must be >= 1");
  RetryOutcome outcome;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const SanitizeStep& step = steps[round % steps.size()];
    SanitizeParams params = step.params;
    params.rng_seed += round;
    RetryRound r;
    r.round = round + 1;
    r.scheme = step.scheme;
    r.metrics = sanitize(device, addr, step.scheme, params);
    r.report = options.method == VerifyMethod::Distribution
                   ? distribution_verify(device, addr, options.uniformity_threshold)
                   : xor_verify_page(device, addr, reference, ecc, options.threshold);
    outcome.total += r.metrics;
    outcome.final_report = r.report;
    outcome.rounds_used = r.round;
    outcome.history.push_back(std::move(r));
    if (outcome.final_report.overall == Verdict::Pass) return outcome;
  }
  throw ExhaustedRoundsError(std::move(outcome));
}

}  // namespace nandguard
