#include "nandguard/report.hpp"

#include "nandguard/image.hpp"

namespace nandguard {

using nlohmann::json;

namespace {

std::string s(std::string_view v) { return std::string(v); }

template <typename T>
json list(const std::vector<T>& items) {
  json out = json::array();
  for (const auto& i : items) out.push_back(to_json(i));
  return out;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return out;
}

}  // namespace

json to_json(const PageAddress& a) { return {{"block", a.block}, {"page", a.page}}; }

json to_json(const SanitizeMetrics& m) {
  return {{"generated_bits", m.generated_bits},
          {"wear_delta", m.wear_delta},
          {"disturb_events", m.disturb_events},
          {"duration_units", m.duration_units}};
}

json to_json(const CellHistogram& h) {
  json levels = json::object();
  levels["ERASED"] = h.count(CellState::Erased);
  for (unsigned k = 0; k < kProgrammedLevels; ++k) {
    const auto st = static_cast<CellState>(k);
    levels[s(to_string(st))] = h.count(st);
  }
  return levels;
}

json to_json(const VerificationReport& r) {
  json sectors = json::array();
  for (const auto& sv : r.per_sector) {
    sectors.push_back({{"sector", sv.sector_index},
                       {"ones_count", sv.ones_count},
                       {"threshold", sv.threshold},
                       {"verdict", s(to_string(sv.verdict))}});
  }
  json out = {{"page", to_json(r.page)},
              {"method", s(to_string(r.method))},
              {"per_sector", sectors},
              {"overall", s(to_string(r.overall))}};
  if (r.histogram) out["histogram"] = to_json(*r.histogram);
  if (r.chi_square) out["chi_square"] = *r.chi_square;
  if (r.uniformity_threshold) out["uniformity_threshold"] = *r.uniformity_threshold;
  return out;
}

json to_json(const ScanHit& h) {
  return {{"location", to_json(h.addr)},
          {"min_distance", h.min_distance},
          {"sector_distances", h.sector_distances},
          {"validity", s(to_string(h.validity))}};
}

json to_json(const RetryOutcome& r) {
  json history = json::array();
  for (const auto& round : r.history) {
    history.push_back({{"round", round.round},
                       {"scheme", s(to_string(round.scheme))},
                       {"metrics", to_json(round.metrics)},
                       {"report", to_json(round.report)}});
  }
  return {{"rounds_used", r.rounds_used},
          {"final_report", to_json(r.final_report)},
          {"history", history},
          {"total", to_json(r.total)}};
}

json to_json(const Recovery& r) {
  return {{"location", to_json(r.location)},
          {"distance", r.distance},
          {"sector_distances", r.sector_distances},
          {"recovered_text", r.recovered_text},
          {"raw_text", r.raw_text},
          {"validity", s(to_string(r.validity))},
          {"unmanaged", r.unmanaged}};
}

json to_json(const RunReport& r) {
  json steps = json::array();
  for (const auto& st : r.steps) {
    json j = {{"action", st.action}, {"detail", st.detail}};
    if (st.timestamp) j["timestamp"] = *st.timestamp;
    steps.push_back(j);
  }
  json locations = json::array();
  for (const auto& loc : r.locations) {
    json j = {{"field", loc.field},
              {"location", to_json(loc.addr)},
              {"validity_before", s(to_string(loc.validity_before))},
              {"distance", loc.distance},
              {"passed", loc.passed}};
    if (loc.retry) j["retry"] = to_json(*loc.retry);
    if (!loc.note.empty()) j["note"] = loc.note;
    locations.push_back(j);
  }
  auto scans = [](const std::map<std::string, std::vector<ScanHit>>& m) {
    json out = json::object();
    for (const auto& [field, hits] : m) out[field] = list(hits);
    return out;
  };
  return {{"record_id", r.record_id},
          {"steps", steps},
          {"stored_values", r.stored_values},
          {"locations", locations},
          {"metrics", to_json(r.metrics)},
          {"residual_scan", scans(r.residual_scan)},
          {"final_scan", scans(r.final_scan)},
          {"outcome", s(to_string(r.outcome))}};
}

json to_json(const BenchmarkTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    rows.push_back({{"scheme", s(to_string(row.scheme))},
                    {"metrics", to_json(row.totals)},
                    {"pages", row.pages},
                    {"xor_pass_pages", row.xor_pass_pages},
                    {"distribution_pass_pages", row.distribution_pass_pages},
                    {"data_generation", row.data_generation},
                    {"native_reporting", row.native_reporting}});
  }
  return {{"pages", t.pages}, {"cells_per_page", t.cells_per_page}, {"rows", rows}};
}

json to_json(const GcReport& r) {
  return {{"victims", r.victims},
          {"destination", r.destination ? json(*r.destination) : json(nullptr)},
          {"pages_moved", r.pages_moved}};
}

json to_json(const WearLevelReport& r) {
  json out = json::array();
  for (const auto& m : r.migrations) {
    out.push_back({{"from", m.from},
                   {"to", m.to},
                   {"pages_moved", m.pages_moved},
                   {"source_erased", m.source_erased}});
  }
  return {{"migrations", out}};
}

json to_json(const TrimReport& r) {
  return {{"trimmed", r.trimmed},
          {"erased_blocks", r.erased_blocks},
          {"relocated_pages", r.relocated_pages},
          {"extra_pe_cycles", r.extra_pe_cycles},
          {"queued", r.queued}};
}

json device_summary(const Ftl& ftl) {
  const Device& dev = ftl.device();
  const Geometry& g = dev.geometry();
  json blocks = json::array();
  for (std::uint32_t b = 0; b < g.blocks_per_device; ++b) {
    const Block& blk = dev.block(b);
    std::string states;
    for (const auto& p : blk.pages) {
      states.push_back(p.validity == Validity::Free ? '.' : p.validity == Validity::Valid ? 'V' : 'I');
    }
    json j = {{"block", b},
              {"pe_cycles", blk.pe_cycles},
              {"bad", blk.bad},
              {"managed", blk.managed},
              {"pages", states}};
    if (const auto reason = ftl.unmanaged().reason(b)) j["unmanaged_reason"] = s(to_string(*reason));
    blocks.push_back(j);
  }
  json map = json::object();
  for (const auto& [lpn, addr] : ftl.map().entries()) map[std::to_string(lpn)] = to_json(addr);
  json queue = json::array();
  for (const auto& e : ftl.trim_policy().deferred_queue) {
    queue.push_back({{"lpn", e.lpn}, {"location", to_json(e.addr)}});
  }
  return {{"geometry",
           {{"blocks_per_device", g.blocks_per_device},
            {"pages_per_block", g.pages_per_block},
            {"cells_per_page", g.cells_per_page},
            {"sectors_per_page", g.sectors_per_page},
            {"bits_per_sector", g.bits_per_sector},
            {"endurance_limit", g.endurance_limit}}},
          {"logical_capacity", ftl.logical_capacity()},
          {"free_pages", ftl.free_page_count()},
          {"state_hash", hex64(state_hash(ftl))},
          {"blocks", blocks},
          {"map", map},
          {"trim_mode", s(to_string(ftl.trim_policy().mode))},
          {"deferred_trim_queue", queue},
          {"invariant_violations", ftl.check_invariants()}};
}

DeidRecord record_from_json(const json& j) {
  auto bad = [](const std::string& what) -> DeidRecord {
    throw Error(ErrorCode::ConfigError, "record: " + what);
  };
  if (!j.is_object()) return bad("must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "id" && k != "fields" && k != "sensitive" && k != "lpns") return bad("unknown key " + k);
  }
  DeidRecord r;
  try {
    r.id = j.value("id", std::string{});
    r.fields = j.at("fields").get<std::map<std::string, std::string>>();
    for (const auto& name : j.value("sensitive", std::vector<std::string>{})) {
      r.sensitive_fields.insert(name);
    }
    r.lpns = j.value("lpns", std::map<std::string, std::int64_t>{});
  } catch (const json::exception& e) {
    return bad(e.what());
  }
  r.validate();
  return r;
}

json to_json(const DeidRecord& r) {
  return {{"id", r.id},
          {"fields", r.fields},
          {"sensitive", std::vector<std::string>(r.sensitive_fields.begin(), r.sensitive_fields.end())},
          {"lpns", r.lpns}};
}

}  // namespace nandguard
