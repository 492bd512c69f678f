#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "nandguard/device.hpp"

using namespace nandguard;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

std::vector<CellState> states(std::initializer_list<int> levels) {
  std::vector<CellState> out;
  for (int l : levels) out.push_back(programmed_level(l));
  return out;
}

}  // namespace

TEST_CASE("cell ordering puts erased below every programmed level") {
  CHECK(rank(CellState::Erased) < rank(CellState::P0));
  CHECK(rank(CellState::P6) < rank(CellState::P7));
  CHECK(read_level(CellState::Erased) == 0);
  CHECK(to_string(CellState::P3) == "P3");
  CHECK(parse_cell_state("ERASED") == CellState::Erased);
  CHECK(parse_cell_state("P8") == std::nullopt);
}

TEST_CASE("geometry validation") {
  Geometry g;
  CHECK_NOTHROW(g.validate());
  g.cells_per_page = 100;  // 300 bits < 512
  CHECK(code_of([&] { g.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("program then read returns the states (direct sensing)") {
  Device d;
  // The stored-page literal of the worked example, first cells.
  const auto target = states({7, 7, 1, 0, 3, 5, 2, 4});
  d.program_page({0, 0}, target, ProgramMode::Full);
  const BitVector bits = d.read_page({0, 0});
  CHECK(bits.slice(0, 24).to_string() == "111111001000011101010100");
  // Untouched cells stay erased and read as zeros.
  CHECK(bits.slice(24, 9).popcount() == 0);
  CHECK(d.page({0, 0}).cells[8] == CellState::Erased);
  CHECK(d.page({0, 0}).validity == Validity::Invalid);
}

TEST_CASE("programming rules") {
  Device d;
  d.program_page({1, 0}, states({3, 3}), ProgramMode::Full);
  CHECK(code_of([&] { d.program_page({1, 0}, states({4}), ProgramMode::Full); }) ==
        ErrorCode::NotErased);
  CHECK(code_of([&] { d.program_page({1, 0}, states({2}), ProgramMode::PartialOverwrite); }) ==
        ErrorCode::DownwardProgram);
  d.program_page({1, 0}, states({5, 3}), ProgramMode::PartialOverwrite);
  CHECK(d.page({1, 0}).cells[0] == CellState::P5);
  CHECK(code_of([&] { (void)d.page({16, 0}); }) == ErrorCode::OutOfRange);
  const std::vector<CellState> too_long(172, CellState::P0);
  CHECK(code_of([&] { d.program_page({2, 0}, too_long, ProgramMode::Full); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("disturb is charged to adjacent pages of the same block") {
  Device d;
  const auto out = d.program_page({0, 4}, states({1}), ProgramMode::Full, disturb_weight::kScrub);
  CHECK(out.disturb_events == 6);
  CHECK(d.page({0, 3}).disturb_count == 3);
  CHECK(d.page({0, 5}).disturb_count == 3);
  CHECK(d.page({1, 4}).disturb_count == 0);
  // Edge page has a single neighbour.
  CHECK(d.program_page({0, 0}, states({1}), ProgramMode::Full).disturb_events == 1);
}

TEST_CASE("erase resets pages, counts PE cycles and retires worn blocks") {
  Geometry g;
  g.endurance_limit = 3;
  Device d(g);
  d.program_page({2, 1}, states({6}), ProgramMode::Full);
  d.mark_valid({2, 1}, 7);
  CHECK(d.erase_block(2).pe_cycles == 1);
  CHECK(d.page({2, 1}).validity == Validity::Free);
  CHECK(!d.page({2, 1}).logical_owner);
  CHECK(d.page({2, 1}).cells[0] == CellState::Erased);
  CHECK(!d.erase_block(2).became_bad);
  CHECK(d.erase_block(2).became_bad);
  CHECK(d.block(2).bad);
  CHECK(!d.block(2).managed);
  CHECK(code_of([&] { d.program_page({2, 0}, states({1}), ProgramMode::Full); }) ==
        ErrorCode::BadBlock);
}

TEST_CASE("sense_and_compare counts differing bits") {
  Device d;
  const auto target = states({7, 7, 1, 0, 3, 5, 2, 4});
  d.program_page({0, 0}, target, ProgramMode::Full);
  BitVector ref = d.read_page({0, 0}).slice(0, 64);
  for (std::size_t i : {0u, 9u, 20u, 33u, 63u}) ref.flip(i);
  const PageBufferResult r = d.sense_and_compare({0, 0}, 0, ref);
  CHECK(r.ones_count == 5);
  CHECK(r.xor_bits.popcount() == 5);
  CHECK(code_of([&] { (void)d.sense_and_compare({0, 0}, 8, ref); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { (void)d.sense_and_compare({0, 0}, 0, ref.slice(0, 10)); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("property: ones_count equals Hamming distance of sensed sector") {
  Rng rng(11);
  Device d;
  for (int trial = 0; trial < 200; ++trial) {
    const PageAddress addr{static_cast<std::uint32_t>(trial % 16),
                           static_cast<std::uint32_t>(trial / 16 % 9)};
    if (d.page(addr).validity != Validity::Free) d.erase_block(addr.block);
    std::vector<CellState> cells(171);
    for (auto& c : cells) c = programmed_level(static_cast<int>(uniform_below(rng, 8)));
    d.program_page(addr, cells, ProgramMode::Full);
    BitVector ref(64);
    for (std::size_t i = 0; i < 64; ++i) ref.set(i, uniform_below(rng, 2) == 1);
    const std::size_t sector = uniform_below(rng, 8);
    const BitVector sensed = d.read_page(addr).slice(sector * 64, 64);
    CHECK(d.sense_and_compare(addr, sector, ref).ones_count == hamming_distance(sensed, ref));
    // Program/read identity on states.
    CHECK(sense_states(cells) == d.read_page(addr));
  }
}

TEST_CASE("read noise flips bits at the requested rate") {
  Device d;
  Rng rng(3);
  std::size_t flips = 0;
  for (int i = 0; i < 50; ++i) flips += d.read_page({0, 0}, 0.1, rng).popcount();
  const double rate = static_cast<double>(flips) / (50.0 * 513);
  CHECK(rate == doctest::Approx(0.1).epsilon(0.15));
  CHECK(d.read_page({0, 0}, 0.0, rng).popcount() == 0);
}

TEST_CASE("histograms") {
  Device d(testing::geometry_144());
  CellHistogram h = d.cell_count_histogram({0, 0});
  CHECK(h.count(CellState::Erased) == 144);
  CHECK(h.total() == 144);
  CHECK(h.readable()[0] == 144);
  d.program_page({0, 0}, std::vector<CellState>(144, CellState::P7), ProgramMode::Full);
  h = d.cell_count_histogram({0, 0});
  CHECK(h.count(CellState::P7) == 144);
  CHECK(h.total() == 144);
}

TEST_CASE("property: only erase lowers cells and PE cycles never decrease") {
  Rng rng(5);
  Device d;
  std::vector<std::uint32_t> pe(16, 0);
  for (int op = 0; op < 2000; ++op) {
    const PageAddress addr{static_cast<std::uint32_t>(uniform_below(rng, 16)),
                           static_cast<std::uint32_t>(uniform_below(rng, 9))};
    const auto before = d.page(addr).cells;
    const auto roll = uniform_below(rng, 10);
    if (roll == 0) {
      d.erase_block(addr.block);
    } else {
      std::vector<CellState> t(171);
      for (auto& c : t) c = programmed_level(static_cast<int>(uniform_below(rng, 8)));
      try {
        d.program_page(addr, t, roll < 5 ? ProgramMode::Full : ProgramMode::PartialOverwrite);
      } catch (const Error&) {
        CHECK(d.page(addr).cells == before);  // rejected programs change nothing
      }
      const auto& after = d.page(addr).cells;
      for (std::size_t i = 0; i < after.size(); ++i) CHECK(rank(after[i]) >= rank(before[i]));
    }
    for (std::uint32_t b = 0; b < 16; ++b) {
      CHECK(d.block(b).pe_cycles >= pe[b]);
      pe[b] = d.block(b).pe_cycles;
    }
  }
}
