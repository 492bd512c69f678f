#include <doctest.h>

#include "helpers.hpp"
#include "nandguard/bench.hpp"
#include "nandguard/config.hpp"
#include "nandguard/forensics.hpp"
#include "nandguard/pipeline.hpp"
#include "nandguard/report.hpp"

using namespace nandguard;

namespace {

DeidRecord basilia() {
  DeidRecord r;
  r.id = "patient-1";
  r.fields = {{"name", "BASILIA"}, {"ward", "3"}};
  r.sensitive_fields = {"name"};
  r.lpns = {{"name", 0}, {"ward", 1}};
  return r;
}

PipelineConfig quiet() {
  PipelineConfig c;
  c.timestamps = false;
  return c;
}

}  // namespace

TEST_CASE("masking and pseudonyms") {
  CHECK(mask_value("BASILIA") == "B******");
  CHECK(mask_value("") == "");
  const std::string p = pseudonymize("BASILIA", "k1");
  CHECK(p.size() == 16);
  CHECK(p.rfind("PSN-", 0) == 0);
  CHECK(pseudonymize("BASILIA", "k1") == p);
  CHECK(pseudonymize("BASILIA", "k2") != p);
  CHECK(pseudonymize("BASILIb", "k1") != p);
}

TEST_CASE("BASILIA is masked, its residue scrubbed, and the run completes") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  ftl.write_logical(1, "3");
  const RunReport r = deid_run(ftl, basilia(), quiet());
  CHECK(r.stored_values.at("name") == "B******");
  CHECK(ftl.read_logical(0).text == "B******");
  CHECK(ftl.read_logical(1).text == "3");
  REQUIRE(r.residual_scan.at("name").size() == 1);
  REQUIRE(r.locations.size() == 1);
  CHECK(r.locations[0].passed);
  REQUIRE(r.locations[0].retry);
  CHECK(r.locations[0].retry->final_report.overall == Verdict::Pass);
  CHECK(r.final_scan.at("name").empty());
  CHECK(r.outcome == DeidOutcome::Complete);
  CHECK(recover(ftl, "BASILIA").empty());
  CHECK(r.metrics.wear_delta == 1);
  for (const auto& s : r.steps) CHECK(!s.timestamp);
  CHECK(ftl.check_invariants().empty());
}

TEST_CASE("skipping secure deletion leaves the original behind") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  PipelineConfig c = quiet();
  c.secure_delete = false;
  const RunReport r = deid_run(ftl, basilia(), c);
  CHECK(r.outcome == DeidOutcome::Incomplete);
  REQUIRE(r.final_scan.at("name").size() == 1);
  CHECK(r.final_scan.at("name")[0].min_distance == 0);
  CHECK(recover(ftl, "BASILIA").size() == 1);
}

TEST_CASE("pipeline config is validated") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  PipelineConfig c = quiet();
  c.scheme_sequence.clear();
  try {
    deid_run(ftl, basilia(), c);
    FAIL("accepted an empty scheme list");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  DeidRecord bad = basilia();
  bad.sensitive_fields.insert("dob");
  CHECK_THROWS_AS(deid_run(ftl, bad, quiet()), Error);
}

TEST_CASE("exhausted verification is reported as incomplete") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  PipelineConfig c = quiet();
  // One pulse moves each cell a single level: ~1.7 bits per cell change,
  // but the threshold is raised past anything reachable.
  c.scheme_sequence = {SanitizeStep{SanitizeScheme::DeletionPulse, SanitizeParams{1, 0}}};
  c.verify.threshold = 64;
  c.max_rounds = 2;
  const RunReport r = deid_run(ftl, basilia(), c);
  CHECK(r.outcome == DeidOutcome::Incomplete);
  REQUIRE(r.locations.size() == 1);
  CHECK(!r.locations[0].passed);
  CHECK(r.locations[0].retry->rounds_used == 2);
  CHECK(!r.locations[0].note.empty());
}

TEST_CASE("a live copy of the original keeps the run incomplete") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  ftl.write_logical(7, "BASILIA");  // duplicate held under another lpn
  const RunReport r = deid_run(ftl, basilia(), quiet());
  CHECK(r.outcome == DeidOutcome::Incomplete);
  CHECK(ftl.read_logical(7).text == "BASILIA");
}

TEST_CASE("pseudonym pipeline with distribution verification") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  PipelineConfig c = quiet();
  c.technique = DeidTechnique::Pseudonym;
  c.verify.method = VerifyMethod::Distribution;
  const RunReport r = deid_run(ftl, basilia(), c);
  CHECK(r.outcome == DeidOutcome::Complete);
  CHECK(r.stored_values.at("name") == pseudonymize("BASILIA", c.pseudonym_key));
  CHECK(r.locations[0].retry->final_report.method == VerifyMethod::Distribution);
}

TEST_CASE("benchmark reproduces the scheme ordering") {
  const BenchmarkTable t = benchmark_schemes(Ftl{}, BenchmarkWorkload{});
  REQUIRE(t.rows.size() == 4);
  const auto& scrub = t.rows[0].totals;
  const auto& partial = t.rows[1].totals;
  const auto& down = t.rows[2].totals;
  const auto& pulse = t.rows[3].totals;
  CHECK(scrub.wear_delta == 100);
  CHECK(partial.wear_delta == 0);
  CHECK(down.wear_delta == 0);
  CHECK(pulse.wear_delta == 0);
  CHECK(scrub.disturb_events > partial.disturb_events);
  CHECK(partial.disturb_events > down.disturb_events);
  CHECK(down.disturb_events == pulse.disturb_events);
  CHECK(pulse.generated_bits == 0);
  CHECK(scrub.generated_bits == 171 * 100);
  CHECK(down.generated_bits == 171 * 100);
  CHECK(partial.generated_bits == 3 * 171 * 100);
  CHECK(t.rows[0].native_reporting == "none");
  CHECK(t.rows[1].native_reporting == "possible (valid area)");
  // Same seed, same table.
  CHECK(to_json(t) == to_json(benchmark_schemes(Ftl{}, BenchmarkWorkload{})));
  CHECK_THROWS_AS(benchmark_schemes(Ftl{}, BenchmarkWorkload{500, 1, 1}), Error);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "geometry": {"blocks_per_device": 8, "cells_per_page": 144, "sectors_per_page": 6},
    "ecc": {"t": 6},
    "ftl": {"trim_mode": "IMMEDIATE", "over_provision": 0.5},
    "pipeline": {"technique": "pseudonym", "schemes": ["DOWN_BIT", "SCRUB"],
                 "verify_method": "DISTRIBUTION", "max_rounds": 4, "pulses": 2}
  })"));
  CHECK(cfg.geometry.blocks_per_device == 8);
  CHECK(cfg.codec.ecc.t == 6);
  CHECK(cfg.ftl.trim_mode == TrimMode::Immediate);
  CHECK(cfg.pipeline.technique == DeidTechnique::Pseudonym);
  REQUIRE(cfg.pipeline.scheme_sequence.size() == 2);
  CHECK(cfg.pipeline.scheme_sequence[0].scheme == SanitizeScheme::DownBit);
  CHECK(cfg.pipeline.scheme_sequence[1].params.pulses == 2);
  CHECK(cfg.pipeline.verify.method == VerifyMethod::Distribution);
  CHECK(cfg.pipeline.max_rounds == 4);

  const auto back = parse_config(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));

  auto rejects = [](const char* text) {
    try {
      (void)parse_config(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigError;
    }
    return false;
  };
  CHECK(rejects(R"({"pipeline": {"schemes": []}})"));
  CHECK(rejects(R"({"pipeline": {"schemes": ["BLEACH"]}})"));
  CHECK(rejects(R"({"geometry": {"cells_per_page": 10}})"));
  CHECK(rejects(R"({"ecc": {"t": 40}})"));
  CHECK(rejects(R"({"colour": 1})"));
  CHECK(rejects(R"({"ecc": {"t": "eight"}})"));
  CHECK(rejects(R"({"scrambler": {"taps": [16, 15]}})"));
}

TEST_CASE("record json") {
  const auto j = nlohmann::json::parse(
      R"({"id":"r","fields":{"name":"BASILIA"},"sensitive":["name"],"lpns":{"name":3}})");
  const DeidRecord r = record_from_json(j);
  CHECK(r.lpns.at("name") == 3);
  CHECK(to_json(r) == j);
  CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(R"({"fields":{},"sensitive":["x"]})")),
                  Error);
}

TEST_CASE("run report json has stable keys") {
  Ftl ftl;
  ftl.write_logical(0, "BASILIA");
  const auto j = to_json(deid_run(ftl, basilia(), quiet()));
  for (const char* key : {"record_id", "steps", "stored_values", "locations", "metrics",
                          "residual_scan", "final_scan", "outcome"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["outcome"] == "DEID_COMPLETE");
  CHECK(j["locations"][0]["retry"]["final_report"]["overall"] == "PASS");
}
