#pragma once

#include <json.hpp>

#include "nandguard/bench.hpp"
#include "nandguard/forensics.hpp"
#include "nandguard/pipeline.hpp"
#include "nandguard/verify.hpp"

namespace nandguard {

// Stable field names; README documents the schema.
nlohmann::json to_json(const PageAddress& addr);
nlohmann::json to_json(const SanitizeMetrics& m);
nlohmann::json to_json(const CellHistogram& h);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const ScanHit& h);
nlohmann::json to_json(const RetryOutcome& r);
nlohmann::json to_json(const Recovery& r);
nlohmann::json to_json(const RunReport& r);
nlohmann::json to_json(const BenchmarkTable& t);
nlohmann::json to_json(const GcReport& r);
nlohmann::json to_json(const WearLevelReport& r);
nlohmann::json to_json(const TrimReport& r);

// Device overview: per-block wear and page states plus FTL tables.
nlohmann::json device_summary(const Ftl& ftl);

DeidRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DeidRecord& r);

}  // namespace nandguard
