#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "nandguard/forensics.hpp"
#include "nandguard/image.hpp"
#include "nandguard/sanitize.hpp"
#include "nandguard/verify.hpp"

using namespace nandguard;

namespace {

Ftl gc_device() {
  Geometry g;
  g.blocks_per_device = 5;
  g.pages_per_block = 4;
  FtlConfig cfg;
  cfg.over_provision = 0.0;
  Ftl ftl(g, CodecConfig{}, cfg);
  for (int l = 0; l < 8; ++l) ftl.write_logical(l, "record-" + std::to_string(l));
  for (int l : {0, 1, 4, 5, 6}) ftl.write_logical(l, "masked-" + std::to_string(l));
  return ftl;
}

}  // namespace

TEST_CASE("dumps of GC-retired blocks are bit-identical to pre-GC content") {
  Ftl fresh;
  CHECK(dump_unmanaged(fresh).empty());

  Ftl ftl = gc_device();
  const Block a = ftl.device().block(0);
  const Block b = ftl.device().block(1);
  ftl.garbage_collect();
  const std::uint64_t hash = state_hash(ftl);
  const auto dumps = dump_unmanaged(ftl);
  CHECK(state_hash(ftl) == hash);
  REQUIRE(dumps.size() == 2);
  CHECK(dumps[0].block == 0);
  CHECK(dumps[0].reason == UnmanagedReason::GcRetired);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(dumps[0].pages[p] == a.pages[p].cells);
    CHECK(dumps[1].pages[p] == b.pages[p].cells);
  }
  const std::string hex = dump_to_hex(dumps[0]);
  CHECK(hex.rfind("0:0 ", 0) == 0);
  CHECK(std::count(hex.begin(), hex.end(), '\n') == 4);
}

TEST_CASE("recovery after de-identification without secure deletion") {
  Ftl ftl;
  const PageAddress old = ftl.write_logical(0, "BASILIA").addr;
  ftl.write_logical(0, "B******");
  const std::uint64_t hash = state_hash(ftl);
  const auto found = recover(ftl, "BASILIA");
  CHECK(state_hash(ftl) == hash);
  REQUIRE(found.size() == 1);
  CHECK(found[0].location == old);
  CHECK(found[0].distance == 0);
  CHECK(found[0].recovered_text == "BASILIA");
  CHECK(found[0].raw_text == "BASILIA");

  scrub(ftl.device(), old);
  CHECK(recover(ftl, "BASILIA").empty());
}

TEST_CASE("recovery within the correction radius") {
  Ftl ftl;
  const PageAddress old = ftl.write_logical(0, "BASILIA").addr;
  ftl.write_logical(0, "B******");
  PhysicalPage p = ftl.device().page(old);
  // Flip the low bit of five cells inside the first sector.
  for (std::size_t c : {1u, 4u, 8u, 12u, 17u}) p.cells[c] = programmed_level(read_level(p.cells[c]) ^ 1);
  ftl.device().restore_page(old, p);
  auto found = recover(ftl, "BASILIA");
  REQUIRE(found.size() == 1);
  CHECK(found[0].distance == 5);
  CHECK(found[0].recovered_text == "BASILIA");
  CHECK(found[0].raw_text != "BASILIA");

  AttackerContext tight;
  tight.ecc_capability_known = 4;
  CHECK(recover(ftl, "BASILIA", tight).empty());
}

TEST_CASE("property: recovery is sound, complete and covers scan hits") {
  Rng rng(55);
  for (int round = 0; round < 20; ++round) {
    Ftl ftl = gc_device();
    for (int i = 0; i < 6; ++i) {
      ftl.write_logical(static_cast<std::int64_t>(uniform_below(rng, 8)),
                        testing::random_printable(rng, 3, 12));
    }
    if (round % 2 == 0) {
      try {
        ftl.garbage_collect();
      } catch (const Error&) {
      }
    }
    const std::string target = "record-" + std::to_string(uniform_below(rng, 8));
    const auto found = recover(ftl, target);

    // Independent brute force over candidate pages.
    const BitVector t = encode_text(target);
    std::set<PageAddress> expected;
    for (std::size_t i = 0; i < ftl.device().geometry().page_count(); ++i) {
      const PageAddress addr = ftl.device().address_of(i);
      const PhysicalPage& page = ftl.device().page(addr);
      const bool hidden = ftl.unmanaged().contains(addr.block) || ftl.device().block(addr.block).bad;
      if (!hidden && page.validity != Validity::Invalid) continue;
      const BitVector bits = descramble(ftl.device().read_page(addr).slice(0, 64), i,
                                        ftl.codec().config().scrambler);
      BitVector want = t;
      want.resize(64);
      std::size_t dist = 0;
      for (std::size_t k = 0; k < 64; ++k) dist += bits[k] != want[k];
      if (dist <= 8) expected.insert(addr);
    }
    std::set<PageAddress> got;
    for (const auto& r : found) {
      got.insert(r.location);
      CHECK(r.distance <= 8);
    }
    CHECK(got == expected);

    for (const auto& hit : antiforensic_scan(ftl.device(), ftl.codec(), target, EccConfig{})) {
      if (ftl.unmanaged().contains(hit.addr.block)) CHECK(got.contains(hit.addr));
    }
  }
}
