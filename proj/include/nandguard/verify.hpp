#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nandguard/codec.hpp"
#include "nandguard/device.hpp"
#include "nandguard/error.hpp"
#include "nandguard/sanitize.hpp"

namespace nandguard {

enum class Verdict : std::uint8_t { Pass, Fail };
enum class VerifyMethod : std::uint8_t { XorCount, Distribution };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(VerifyMethod m) noexcept;
std::optional<VerifyMethod> parse_verify_method(std::string_view text) noexcept;

// 95th percentile of chi-square with 7 degrees of freedom.
inline constexpr double kDefaultUniformityThreshold = 14.07;

// Deletion passes only when strictly more bits differ than ECC could repair.
constexpr Verdict verdict_for(std::size_t ones_count, std::size_t threshold) noexcept {
  return ones_count > threshold ? Verdict::Pass : Verdict::Fail;
}

struct SectorVerdict {
  std::size_t sector_index = 0;
  std::size_t ones_count = 0;
  std::size_t threshold = 0;
  Verdict verdict = Verdict::Fail;

  friend bool operator==(const SectorVerdict&, const SectorVerdict&) = default;
};

struct VerificationReport {
  PageAddress page;
  VerifyMethod method = VerifyMethod::XorCount;
  std::vector<SectorVerdict> per_sector;
  Verdict overall = Verdict::Fail;
  std::optional<CellHistogram> histogram;
  std::optional<double> chi_square;
  std::optional<double> uniformity_threshold;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

// XOR of one sensed sector with the personal data, counted by the cell
// counter. threshold defaults to ecc.t.
SectorVerdict xor_verify_sector(const Device& device, PageAddress addr, std::size_t sector_index,
                                const BitVector& reference_bits, const EccConfig& ecc,
                                std::optional<std::size_t> threshold = std::nullopt);

// All sectors in order; PASS only if every sector passes.
VerificationReport xor_verify_page(const Device& device, PageAddress addr,
                                   const BitVector& reference_page_bits, const EccConfig& ecc,
                                   std::optional<std::size_t> threshold = std::nullopt);

// Pearson statistic of the eight readable levels against cells/8 each.
double chi_square_uniform(const CellHistogram& histogram);

// Reference-free check: randomized data programs a near-uniform histogram,
// so a skewed one means the data is gone. PASS iff statistic > threshold.
VerificationReport distribution_verify(const Device& device, PageAddress addr,
                                       double uniformity_threshold = kDefaultUniformityThreshold);

struct ScanHit {
  PageAddress addr;
  std::size_t min_distance = 0;
  std::vector<std::size_t> sector_distances;
  Validity validity = Validity::Free;

  friend bool operator==(const ScanHit&, const ScanHit&) = default;
};

// Searches every physical page for an ECC-equivalent copy of the text. Each
// page is compared against the text as it would be stored at that page, over
// the sectors that carry text bits.
std::vector<ScanHit> antiforensic_scan(const Device& device, const PageCodec& codec,
                                       std::string_view personal_data, const EccConfig& ecc);

struct VerifyOptions {
  VerifyMethod method = VerifyMethod::XorCount;
  std::optional<std::size_t> threshold;
  double uniformity_threshold = kDefaultUniformityThreshold;
};

struct SanitizeStep {
  SanitizeScheme scheme = SanitizeScheme::Scrub;
  SanitizeParams params;
};

struct RetryRound {
  std::size_t round = 0;
  SanitizeScheme scheme = SanitizeScheme::Scrub;
  SanitizeMetrics metrics;
  VerificationReport report;
};

struct RetryOutcome {
  VerificationReport final_report;
  std::size_t rounds_used = 0;
  std::vector<RetryRound> history;
  SanitizeMetrics total;
};

class ExhaustedRoundsError : public Error {
 public:
  explicit ExhaustedRoundsError(RetryOutcome outcome);
  const RetryOutcome& outcome() const noexcept { return outcome_; }

 private:
  RetryOutcome outcome_;
};

// Sanitize, verify, repeat with the next scheme (cycling) until PASS.
// Throws ExhaustedRoundsError carrying the history when max_rounds pass
// without a PASS.
RetryOutcome verify_and_retry(Device& device, PageAddress addr, const BitVector& reference,
                              std::span<const SanitizeStep> steps, const EccConfig& ecc,
                              std::size_t max_rounds, const VerifyOptions& options = {});

}  // namespace nandguard
