#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nandguard/ftl.hpp"
#include "nandguard/verify.hpp"

namespace nandguard {

enum class DeidTechnique : std::uint8_t { Mask, Pseudonym };

std::string_view to_string(DeidTechnique t) noexcept;
std::optional<DeidTechnique> parse_deid_technique(std::string_view text) noexcept;

struct DeidRecord {
  std::string id;
  std::map<std::string, std::string> fields;
  std::set<std::string> sensitive_fields;
  // Where each field is stored on the device.
  std::map<std::string, std::int64_t> lpns;

  // Throws ConfigError unless sensitive fields exist and have an lpn.
  void validate() const;
};

struct PipelineConfig {
  DeidTechnique technique = DeidTechnique::Mask;
  std::vector<SanitizeStep> scheme_sequence{SanitizeStep{}};
  VerifyOptions verify;
  std::size_t max_rounds = 3;
  TrimMode trim_mode = TrimMode::Deferred;
  // false: rewrite the de-identified values and stop there.
  bool secure_delete = true;
  std::uint64_t seed = 0;
  std::string pseudonym_key = "nandguard";
  bool timestamps = true;

  // Throws ConfigError on an empty scheme sequence or zero rounds.
  void validate() const;
};

// Keeps the first character and stars out the rest.
std::string mask_value(std::string_view value);
// Stable keyed substitution: "PSN-" followed by 12 hex digits.
std::string pseudonymize(std::string_view value, std::string_view key);

struct RunStep {
  std::string action;
  std::string detail;
  std::optional<std::string> timestamp;
};

struct LocationResult {
  std::string field;
  PageAddress addr;
  Validity validity_before = Validity::Invalid;
  std::size_t distance = 0;
  std::optional<RetryOutcome> retry;
  bool passed = false;
  std::string note;
};

enum class DeidOutcome : std::uint8_t { Complete, Incomplete };
std::string_view to_string(DeidOutcome o) noexcept;

struct RunReport {
  std::string record_id;
  std::vector<RunStep> steps;
  std::map<std::string, std::string> stored_values;
  std::vector<LocationResult> locations;
  SanitizeMetrics metrics;
  std::map<std::string, std::vector<ScanHit>> residual_scan;
  std::map<std::string, std::vector<ScanHit>> final_scan;
  DeidOutcome outcome = DeidOutcome::Incomplete;
};

// Reads each sensitive value, writes its de-identified form back (out of
// place), then hunts down and sanitizes every physical copy of the original,
// verifying each deletion. COMPLETE only when every copy verified PASS and a
// final scan finds nothing.
RunReport deid_run(Ftl& ftl, const DeidRecord& record, const PipelineConfig& config);

}  // namespace nandguard
