#include "nandguard/config.hpp"

#include <fstream>
#include <set>

namespace nandguard {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void expect_object(const json& j, const std::string& where, const std::set<std::string>& keys) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) bad("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

void read_u32(const json& j, const char* key, std::uint32_t& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::int64_t>() > 0xFFFFFFFFLL) {
    bad(where + "." + key + " must be a non-negative integer");
  }
  out = v.get<std::uint32_t>();
}

SanitizeScheme scheme_from(const json& v) {
  if (!v.is_string()) bad("scheme names must be strings");
  const auto s = parse_sanitize_scheme(v.get<std::string>());
  if (!s) bad("unknown sanitize scheme '" + v.get<std::string>() + "'");
  return *s;
}

TrimMode trim_mode_from(const std::string& s) {
  if (s == "DEFERRED" || s == "deferred") return TrimMode::Deferred;
  if (s == "IMMEDIATE" || s == "immediate") return TrimMode::Immediate;
  bad("unknown trim mode '" + s + "'");
}

}  // namespace

ToolConfig parse_config(const json& doc) {
  ToolConfig cfg;
  expect_object(doc, "config", {"geometry", "ecc", "scrambler", "mapping", "ftl", "pipeline"});

  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    expect_object(g, "geometry",
                  {"blocks_per_device", "pages_per_block", "cells_per_page", "sectors_per_page",
                   "bits_per_sector", "endurance_limit"});
    read_u32(g, "blocks_per_device", cfg.geometry.blocks_per_device, "geometry");
    read_u32(g, "pages_per_block", cfg.geometry.pages_per_block, "geometry");
    read_u32(g, "cells_per_page", cfg.geometry.cells_per_page, "geometry");
    read_u32(g, "sectors_per_page", cfg.geometry.sectors_per_page, "geometry");
    read_u32(g, "bits_per_sector", cfg.geometry.bits_per_sector, "geometry");
    read_u32(g, "endurance_limit", cfg.geometry.endurance_limit, "geometry");
  }
  cfg.codec.ecc.sector_bits = cfg.geometry.bits_per_sector;
  if (doc.contains("ecc")) {
    expect_object(doc["ecc"], "ecc", {"t"});
    read_u32(doc["ecc"], "t", cfg.codec.ecc.t, "ecc");
  }
  if (doc.contains("scrambler")) {
    const json& s = doc["scrambler"];
    expect_object(s, "scrambler", {"taps", "seed_base"});
    read(s, "taps", cfg.codec.scrambler.taps, "scrambler");
    std::uint32_t seed = cfg.codec.scrambler.seed_base;
    read_u32(s, "seed_base", seed, "scrambler");
    if (seed > 0xFFFF) bad("scrambler.seed_base must fit 16 bits");
    cfg.codec.scrambler.seed_base = static_cast<std::uint16_t>(seed);
  }
  if (doc.contains("mapping")) {
    const json& m = doc["mapping"];
    if (!m.is_array() || m.size() != 8) bad("mapping must list 8 cell states");
    std::array<CellState, 8> fwd{};
    for (std::size_t i = 0; i < 8; ++i) {
      if (!m[i].is_string()) bad("mapping entries must be strings");
      const auto st = parse_cell_state(m[i].get<std::string>());
      if (!st) bad("unknown cell state '" + m[i].get<std::string>() + "'");
      fwd[i] = *st;
    }
    cfg.codec.mapping = MappingTable::from_forward(fwd);
  }
  if (doc.contains("ftl")) {
    const json& f = doc["ftl"];
    expect_object(f, "ftl",
                  {"over_provision", "trim_mode", "wear_defer_erase", "deferred_trim_pressure"});
    read(f, "over_provision", cfg.ftl.over_provision, "ftl");
    std::string mode(to_string(cfg.ftl.trim_mode));
    read(f, "trim_mode", mode, "ftl");
    cfg.ftl.trim_mode = trim_mode_from(mode);
    read(f, "wear_defer_erase", cfg.ftl.wear_defer_erase, "ftl");
    read(f, "deferred_trim_pressure", cfg.ftl.deferred_trim_pressure, "ftl");
  }
  cfg.pipeline.trim_mode = cfg.ftl.trim_mode;
  if (doc.contains("pipeline")) {
    const json& p = doc["pipeline"];
    expect_object(p, "pipeline",
                  {"technique", "schemes", "verify_method", "max_rounds", "pulses", "seed",
                   "pseudonym_key", "secure_delete", "threshold", "uniformity_threshold"});
    PipelineConfig& pc = cfg.pipeline;
    if (p.contains("technique")) {
      std::string t;
      read(p, "technique", t, "pipeline");
      const auto tech = parse_deid_technique(t);
      if (!tech) bad("unknown technique '" + t + "'");
      pc.technique = *tech;
    }
    unsigned pulses = pc.scheme_sequence.front().params.pulses;
    read(p, "pulses", pulses, "pipeline");
    if (p.contains("schemes")) {
      if (!p["schemes"].is_array()) bad("pipeline.schemes must be an array");
      pc.scheme_sequence.clear();
      for (const json& v : p["schemes"]) {
        pc.scheme_sequence.push_back(SanitizeStep{scheme_from(v), SanitizeParams{}});
      }
    }
    for (auto& s : pc.scheme_sequence) s.params.pulses = pulses;
    if (p.contains("verify_method")) {
      std::string m;
      read(p, "verify_method", m, "pipeline");
      const auto vm = parse_verify_method(m);
      if (!vm) bad("unknown verify method '" + m + "'");
      pc.verify.method = *vm;
    }
    read(p, "max_rounds", pc.max_rounds, "pipeline");
    read(p, "seed", pc.seed, "pipeline");
    read(p, "pseudonym_key", pc.pseudonym_key, "pipeline");
    read(p, "secure_delete", pc.secure_delete, "pipeline");
    if (p.contains("threshold") && !p["threshold"].is_null()) {
      std::size_t th = 0;
      read(p, "threshold", th, "pipeline");
      pc.verify.threshold = th;
    }
    read(p, "uniformity_threshold", pc.verify.uniformity_threshold, "pipeline");
  }

  cfg.geometry.validate();
  cfg.codec.ecc.validate();
  cfg.codec.scrambler.validate();
  cfg.ftl.validate();
  cfg.pipeline.validate();
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ToolConfig& c) {
  json mapping = json::array();
  for (CellState s : c.codec.mapping.forward()) mapping.push_back(std::string(to_string(s)));
  json schemes = json::array();
  for (const auto& s : c.pipeline.scheme_sequence) schemes.push_back(std::string(to_string(s.scheme)));
  const unsigned pulses =
      c.pipeline.scheme_sequence.empty() ? 7 : c.pipeline.scheme_sequence.front().params.pulses;
  return {
      {"geometry",
       {{"blocks_per_device", c.geometry.blocks_per_device},
        {"pages_per_block", c.geometry.pages_per_block},
        {"cells_per_page", c.geometry.cells_per_page},
        {"sectors_per_page", c.geometry.sectors_per_page},
        {"bits_per_sector", c.geometry.bits_per_sector},
        {"endurance_limit", c.geometry.endurance_limit}}},
      {"ecc", {{"t", c.codec.ecc.t}}},
      {"scrambler", {{"taps", c.codec.scrambler.taps}, {"seed_base", c.codec.scrambler.seed_base}}},
      {"mapping", mapping},
      {"ftl",
       {{"over_provision", c.ftl.over_provision},
        {"trim_mode", std::string(to_string(c.ftl.trim_mode))},
        {"wear_defer_erase", c.ftl.wear_defer_erase},
        {"deferred_trim_pressure", c.ftl.deferred_trim_pressure}}},
      {"pipeline",
       {{"technique", std::string(to_string(c.pipeline.technique))},
        {"schemes", schemes},
        {"verify_method", std::string(to_string(c.pipeline.verify.method))},
        {"max_rounds", c.pipeline.max_rounds},
        {"pulses", pulses},
        {"seed", c.pipeline.seed},
        {"pseudonym_key", c.pipeline.pseudonym_key},
        {"secure_delete", c.pipeline.secure_delete},
        {"threshold", c.pipeline.verify.threshold ? json(*c.pipeline.verify.threshold) : json(nullptr)},
        {"uniformity_threshold", c.pipeline.verify.uniformity_threshold}}}};
}

}  // namespace nandguard
