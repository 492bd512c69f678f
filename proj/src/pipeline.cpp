#include "nandguard/pipeline.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace nandguard {

std::string_view to_string(DeidTechnique t) noexcept {
  return t == DeidTechnique::Pseudonym ? "PSEUDONYM" : "MASK";
}

std::optional<DeidTechnique> parse_deid_technique(std::string_view text) noexcept {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "mask") return DeidTechnique::Mask;
  if (key == "pseudonym") return DeidTechnique::Pseudonym;
  return std::nullopt;
}

std::string_view to_string(DeidOutcome o) noexcept {
  return o == DeidOutcome::Complete ? "DEID_COMPLETE" : "DEID_INCOMPLETE";
}

void DeidRecord::validate() const {
  for (const auto& name : sensitive_fields) {
    if (!fields.contains(name)) {
      throw Error(ErrorCode::ConfigError, "sensitive field '" + name + "' is not a record field");
    }
    if (!lpns.contains(name)) {
      throw Error(ErrorCode::ConfigError, "sensitive field '" + name + "' has no lpn");
    }
  }
}

void PipelineConfig::validate() const {
  if (scheme_sequence.empty()) throw Error(ErrorCode::ConfigError, "scheme sequence is empty");
  if (max_rounds == 0) throw Error(ErrorCode::ConfigError, "max_rounds must be >= 1");
}

std::string mask_value(std::string_view value) {
  if (value.empty()) return {};
  return std::string(1, value.front()) + std::string(value.size() - 1, '*');
}

std::string pseudonymize(std::string_view value, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(key);
  mix(std::string_view("\x1f", 1));
  mix(value);
  char buf[32];
  std::snprintf(buf, sizeof buf, "PSN-%012llx",
                static_cast<unsigned long long>(h & 0xFFFFFFFFFFFFULL));
  return buf;
}

namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunReport deid_run(Ftl& ftl, const DeidRecord& record, const PipelineConfig& config) {
  config.validate();
  record.validate();

  RunReport report;
  report.record_id = record.id;
  auto step = [&](std::string action, std::string detail) {
    RunStep s{std::move(action), std::move(detail), std::nullopt};
    if (config.timestamps) s.timestamp = now_utc();
    report.steps.push_back(std::move(s));
  };

  const EccConfig& ecc = ftl.codec().config().ecc;
  std::map<std::string, std::string> originals;
  for (const auto& field : record.sensitive_fields) {
    const std::int64_t lpn = record.lpns.at(field);
    originals[field] = ftl.read_logical(lpn).text;
    step("read", field + " from lpn " + std::to_string(lpn));
    const std::string replaced = config.technique == DeidTechnique::Mask
                                     ? mask_value(originals[field])
                                     : pseudonymize(originals[field], config.pseudonym_key);
    const WriteOutcome w = ftl.write_logical(lpn, replaced);
    report.stored_values[field] = replaced;
    step("write", field + " de-identified to " + to_string(w.addr) +
                      (w.previous ? ", previous copy left at " + to_string(*w.previous) : ""));
  }

  for (const auto& [field, original] : originals) {
    report.residual_scan[field] = antiforensic_scan(ftl.device(), ftl.codec(), original, ecc);
    step("scan", field + ": " + std::to_string(report.residual_scan[field].size()) +
                     " physical copies");
  }

  bool all_passed = true;
  if (!config.secure_delete) {
    step("sanitize", "skipped by configuration");
  } else {
    std::size_t location_index = 0;
    for (const auto& [field, original] : originals) {
      const BitVector payload = encode_text(original);
      for (const ScanHit& hit : report.residual_scan[field]) {
        LocationResult loc;
        loc.field = field;
        loc.addr = hit.addr;
        loc.validity_before = hit.validity;
        loc.distance = hit.min_distance;
        if (hit.validity == Validity::Valid) {
          loc.note = "live mapped page is equivalent to the original";
        } else if (ftl.device().block(hit.addr.block).bad) {
          loc.note = "copy sits in a bad block and cannot be programmed";
        } else {
          const BitVector reference =
              ftl.codec().sensed_reference(payload, ftl.device().global_page_index(hit.addr));
          std::vector<SanitizeStep> steps = config.scheme_sequence;
          for (auto& s : steps) s.params.rng_seed += config.seed + 1000 * location_index;
          try {
            loc.retry = verify_and_retry(ftl.device(), hit.addr, reference, steps, ecc,
                                         config.max_rounds, config.verify);
            loc.passed = true;
          } catch (const ExhaustedRoundsError& e) {
            loc.retry = e.outcome();
            loc.note = "verification still FAIL after max_rounds";
          }
          report.metrics += loc.retry->total;
          step("sanitize", field + " at " + to_string(hit.addr) + ": " +
                               std::to_string(loc.retry->rounds_used) + " round(s), " +
                               std::string(to_string(loc.retry->final_report.overall)));
        }
        all_passed = all_passed && loc.passed;
        report.locations.push_back(std::move(loc));
        ++location_index;
      }
    }
  }

  bool residue = false;
  for (const auto& [field, original] : originals) {
    report.final_scan[field] = antiforensic_scan(ftl.device(), ftl.codec(), original, ecc);
    residue = residue || !report.final_scan[field].empty();
    step("final_scan", field + ": " + std::to_string(report.final_scan[field].size()) + " hits");
  }
  const bool verified = config.secure_delete && all_passed;
  report.outcome = verified && !residue ? DeidOutcome::Complete : DeidOutcome::Incomplete;
  if (!config.secure_delete && !residue) report.outcome = DeidOutcome::Complete;
  step("outcome", std::string(to_string(report.outcome)));
  return report;
}

}  // namespace nandguard
