#include "nandguard/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nandguard/bench.hpp"
#include "nandguard/config.hpp"
#include "nandguard/forensics.hpp"
#include "nandguard/image.hpp"
#include "nandguard/report.hpp"

namespace nandguard {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string image;
  std::uint64_t seed = 0;
  std::string config;
  std::string json_out;
  bool no_timestamps = false;
};

// Thrown for problems with how the tool was invoked.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Session {
 public:
  Session(Globals g, std::ostream& out) : g_(std::move(g)), out_(out) {
    if (!g_.config.empty()) cfg_ = load_config(g_.config);
    if (g_.no_timestamps) cfg_.pipeline.timestamps = false;
  }

  const ToolConfig& config() const { return cfg_; }
  ToolConfig& config() { return cfg_; }
  std::uint64_t seed() const { return g_.seed; }

  Ftl load() const {
    if (g_.image.empty()) throw UsageError("--image is required");
    return image_load(g_.image);
  }
  void save(const Ftl& ftl) const { image_save(ftl, g_.image); }
  const std::string& image_path() const { return g_.image; }

  void emit(const json& j) const {
    const std::string text = j.dump(2) + "\n";
    out_ << text;
    if (!g_.json_out.empty()) {
      std::ofstream f(g_.json_out, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(ErrorCode::IoError, "cannot write " + g_.json_out);
      f << text;
    }
  }

 private:
  Globals g_;
  std::ostream& out_;
  ToolConfig cfg_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

SanitizeScheme scheme_arg(const std::string& name) {
  const auto s = parse_sanitize_scheme(name);
  if (!s) throw UsageError("unknown scheme '" + name + "'");
  return *s;
}

PageAddress page_arg(const Ftl& ftl, std::uint32_t block, std::uint32_t page) {
  const Geometry& g = ftl.device().geometry();
  if (block >= g.blocks_per_device || page >= g.pages_per_block) {
    throw UsageError("page " + std::to_string(block) + ":" + std::to_string(page) +
                     " is outside the device");
  }
  return {block, page};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParameterError:
    case ErrorCode::IoError:
    case ErrorCode::CorruptImage:
    case ErrorCode::VersionMismatch:
    case ErrorCode::OutOfRange:
    case ErrorCode::NonAsciiCharacter:
      return kExitUsage;
    default:
      return kExitDomainFailure;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NAND flash secure-deletion simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--image", g.image, "Flash image file");
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--config", g.config, "JSON scenario config");
  app.add_option("--json-out", g.json_out, "Also write the JSON report here");
  app.add_flag("--no-timestamps", g.no_timestamps, "Leave timestamps out of reports");

  std::function<int(Session&)> action;

  auto* create = app.add_subcommand("create", "Create an erased device image");
  bool force = false;
  create->add_flag("--force", force, "Overwrite an existing image");
  create->callback([&] {
    action = [&](Session& s) {
      if (s.image_path().empty()) throw UsageError("--image is required");
      if (fs::exists(s.image_path()) && !force) {
        throw UsageError(s.image_path() + " exists; pass --force to replace it");
      }
      const Ftl ftl(s.config().geometry, s.config().codec, s.config().ftl);
      s.save(ftl);
      s.emit(device_summary(ftl));
      return kExitOk;
    };
  });

  std::int64_t lpn = 0;
  std::string text;
  auto* write = app.add_subcommand("write", "Write text to a logical page");
  write->add_option("--lpn", lpn)->required();
  write->add_option("--text", text)->required();
  write->callback([&] {
    action = [&](Session& s) {
      Ftl ftl = s.load();
      const WriteOutcome w = ftl.write_logical(lpn, text);
      s.save(ftl);
      s.emit({{"lpn", lpn},
              {"location", to_json(w.addr)},
              {"previous", w.previous ? to_json(*w.previous) : json(nullptr)}});
      return kExitOk;
    };
  });

  double ber = 0.0;
  auto* read = app.add_subcommand("read", "Read a logical page");
  read->add_option("--lpn", lpn)->required();
  read->add_option("--ber", ber, "Raw bit error rate applied while sensing")
      ->check(CLI::Range(0.0, 1.0));
  read->callback([&] {
    action = [&](Session& s) {
      const Ftl ftl = s.load();
      Rng rng(s.seed());
      ReadOptions opts;
      opts.ber = ber;
      if (ber > 0.0) opts.rng = &rng;
      const ReadResult r = ftl.read_logical(lpn, opts);
      s.emit({{"lpn", lpn},
              {"location", to_json(r.addr)},
              {"text", r.text},
              {"corrections_used", r.corrections_used}});
      return kExitOk;
    };
  });

  std::vector<std::int64_t> lpns;
  std::string mode;
  auto* trim = app.add_subcommand("trim", "Trim logical pages");
  trim->add_option("--lpn", lpns)->required();
  trim->add_option("--mode", mode, "deferred or immediate (default: the image's mode)");
  trim->callback([&] {
    action = [&](Session& s) {
      Ftl ftl = s.load();
      TrimReport r;
      if (mode.empty()) {
        r = ftl.trim(lpns);
      } else if (mode == "deferred" || mode == "DEFERRED") {
        r = ftl.trim(lpns, TrimMode::Deferred);
      } else if (mode == "immediate" || mode == "IMMEDIATE") {
        r = ftl.trim(lpns, TrimMode::Immediate);
      } else {
        throw UsageError("unknown trim mode '" + mode + "'");
      }
      s.save(ftl);
      s.emit(to_json(r));
      return kExitOk;
    };
  });

  std::optional<std::uint32_t> wear_delta;
  auto* gc = app.add_subcommand("gc", "Run garbage collection");
  gc->add_option("--wear-level", wear_delta, "Also wear-level with this PE threshold");
  gc->callback([&] {
    action = [&](Session& s) {
      Ftl ftl = s.load();
      json j = {{"gc", to_json(ftl.garbage_collect())}};
      if (wear_delta) j["wear_level"] = to_json(ftl.wear_level(*wear_delta));
      s.save(ftl);
      s.emit(j);
      return kExitOk;
    };
  });

  std::string record_path;
  std::optional<std::string> schemes;
  std::string technique;
  std::string method;
  std::optional<std::size_t> max_rounds;
  bool store = false;
  bool no_sanitize = false;
  auto* deid = app.add_subcommand("deid", "De-identify a record and purge its originals");
  deid->add_option("--record", record_path, "Record JSON")->required();
  deid->add_option("--schemes", schemes, "Comma-separated sanitize schemes");
  deid->add_option("--technique", technique, "mask or pseudonym");
  deid->add_option("--verify-method", method, "xor_count or distribution");
  deid->add_option("--max-rounds", max_rounds);
  deid->add_flag("--store", store, "Write the record's fields to their lpns first");
  deid->add_flag("--no-sanitize", no_sanitize, "Rewrite values only; leave originals behind");
  deid->callback([&] {
    action = [&](Session& s) {
      PipelineConfig pc = s.config().pipeline;
      if (schemes) {
        const unsigned pulses = pc.scheme_sequence.empty() ? 7 : pc.scheme_sequence.front().params.pulses;
        pc.scheme_sequence.clear();
        for (const auto& name : split_list(*schemes)) {
          pc.scheme_sequence.push_back(SanitizeStep{scheme_arg(name), SanitizeParams{pulses, 0}});
        }
      }
      if (!technique.empty()) {
        const auto t = parse_deid_technique(technique);
        if (!t) throw UsageError("unknown technique '" + technique + "'");
        pc.technique = *t;
      }
      if (!method.empty()) {
        const auto m = parse_verify_method(method);
        if (!m) throw UsageError("unknown verify method '" + method + "'");
        pc.verify.method = *m;
      }
      if (max_rounds) pc.max_rounds = *max_rounds;
      if (no_sanitize) pc.secure_delete = false;
      pc.seed = s.seed();
      pc.validate();

      std::ifstream in(record_path);
      if (!in) throw UsageError("cannot open record " + record_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, record_path + ": " + e.what());
      }
      const DeidRecord record = record_from_json(doc);

      Ftl ftl = s.load();
      if (store) {
        for (const auto& [field, l] : record.lpns) ftl.write_logical(l, record.fields.at(field));
      }
      const RunReport report = deid_run(ftl, record, pc);
      s.save(ftl);
      s.emit(to_json(report));
      return report.outcome == DeidOutcome::Complete ? kExitOk : kExitDomainFailure;
    };
  });

  std::uint32_t block = 0;
  std::uint32_t page = 0;
  std::string scheme_name;
  unsigned pulses = 7;
  auto* san = app.add_subcommand("sanitize", "Sanitize one physical page");
  san->add_option("--block", block)->required();
  san->add_option("--page", page)->required();
  san->add_option("--scheme", scheme_name)->required();
  san->add_option("--pulses", pulses);
  san->callback([&] {
    action = [&](Session& s) {
      Ftl ftl = s.load();
      const PageAddress addr = page_arg(ftl, block, page);
      ftl.release_physical(addr);
      const SanitizeMetrics m =
          sanitize(ftl.device(), addr, scheme_arg(scheme_name), SanitizeParams{pulses, s.seed()});
      s.save(ftl);
      s.emit({{"location", to_json(addr)}, {"scheme", scheme_name}, {"metrics", to_json(m)}});
      return kExitOk;
    };
  });

  std::string reference_text;
  std::optional<std::size_t> threshold;
  auto* ver = app.add_subcommand("verify", "Verify deletion of one physical page");
  ver->add_option("--block", block)->required();
  ver->add_option("--page", page)->required();
  ver->add_option("--reference-text", reference_text, "Original data (xor_count method)");
  ver->add_option("--method", method, "xor_count or distribution");
  ver->add_option("--threshold", threshold, "Ones needed to pass (default: ECC t)");
  ver->callback([&] {
    action = [&](Session& s) {
      const Ftl ftl = s.load();
      const PageAddress addr = page_arg(ftl, block, page);
      VerifyMethod m = s.config().pipeline.verify.method;
      if (!method.empty()) {
        const auto parsed = parse_verify_method(method);
        if (!parsed) throw UsageError("unknown verify method '" + method + "'");
        m = *parsed;
      }
      VerificationReport r;
      if (m == VerifyMethod::Distribution) {
        r = distribution_verify(ftl.device(), addr, s.config().pipeline.verify.uniformity_threshold);
      } else {
        if (reference_text.empty()) throw UsageError("--reference-text is required for xor_count");
        const BitVector ref = ftl.codec().sensed_reference(
            encode_text(reference_text), ftl.device().global_page_index(addr));
        const auto th = threshold ? threshold : s.config().pipeline.verify.threshold;
        r = xor_verify_page(ftl.device(), addr, ref, ftl.codec().config().ecc, th);
      }
      s.emit(to_json(r));
      return r.overall == Verdict::Pass ? kExitOk : kExitDomainFailure;
    };
  });

  std::string target;
  auto* scan = app.add_subcommand("scan", "Search every physical page for a value");
  scan->add_option("--target", target)->required();
  scan->callback([&] {
    action = [&](Session& s) {
      const Ftl ftl = s.load();
      const auto hits =
          antiforensic_scan(ftl.device(), ftl.codec(), target, ftl.codec().config().ecc);
      json list = json::array();
      for (const auto& h : hits) list.push_back(to_json(h));
      s.emit({{"target_length", target.size()}, {"hits", list}});
      return hits.empty() ? kExitOk : kExitDomainFailure;
    };
  });

  bool no_map = false;
  bool no_bad_list = false;
  std::optional<std::size_t> ecc_known;
  std::string dump_dir;
  auto* rec = app.add_subcommand("recover", "Attempt forensic recovery of a value");
  rec->add_option("--target", target)->required();
  rec->add_flag("--no-map-table", no_map);
  rec->add_flag("--no-bad-block-list", no_bad_list);
  rec->add_option("--ecc-known", ecc_known, "Correction radius the attacker assumes");
  rec->add_option("--dump-dir", dump_dir, "Write hex dumps of unmanaged blocks here");
  rec->callback([&] {
    action = [&](Session& s) {
      const Ftl ftl = s.load();
      AttackerContext ctx{!no_map, !no_bad_list, ecc_known};
      const auto found = recover(ftl, target, ctx);
      json list = json::array();
      for (const auto& r : found) list.push_back(to_json(r));
      json dumps = json::array();
      if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        for (const auto& d : dump_unmanaged(ftl)) {
          const fs::path p = fs::path(dump_dir) / ("block_" + std::to_string(d.block) + ".hex");
          std::ofstream f(p, std::ios::trunc);
          if (!f) throw Error(ErrorCode::IoError, "cannot write " + p.string());
          f << dump_to_hex(d);
          dumps.push_back(p.string());
        }
      }
      s.emit({{"recoveries", list}, {"dumps", dumps}});
      return kExitOk;
    };
  });

  std::size_t bench_pages = 100;
  unsigned bench_pulses = 1;
  auto* bench = app.add_subcommand("bench", "Compare sanitize schemes on a seeded workload");
  bench->add_option("--pages", bench_pages);
  bench->add_option("--pulses", bench_pulses);
  bench->callback([&] {
    action = [&](Session& s) {
      const Ftl tmpl = s.image_path().empty()
                           ? Ftl(s.config().geometry, s.config().codec, s.config().ftl)
                           : s.load();
      const BenchmarkTable t =
          benchmark_schemes(tmpl, BenchmarkWorkload{bench_pages, s.seed(), bench_pulses});
      s.emit(to_json(t));
      return kExitOk;
    };
  });

  auto* rep = app.add_subcommand("report", "Summarize device state");
  rep->callback([&] {
    action = [&](Session& s) {
      const Ftl ftl = s.load();
      s.emit(device_summary(ftl));
      return ftl.check_invariants().empty() ? kExitOk : kExitDomainFailure;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Session session(g, out);
    return action(session);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace nandguard
