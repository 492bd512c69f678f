#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "nandguard/codec.hpp"

using namespace nandguard;

namespace {

// Reference register written from the recurrence, independent of Lfsr16:
// s[n+16] = s[n] ^ s[n+2] ^ s[n+3] ^ s[n+5] for taps 16,14,13,11.
std::vector<int> recurrence_keystream(std::uint16_t seed, std::size_t n) {
  std::vector<int> s;
  for (int i = 0; i < 16; ++i) s.push_back((seed >> i) & 1);
  while (s.size() < n) {
    const std::size_t k = s.size() - 16;
    s.push_back(s[k] ^ s[k + 2] ^ s[k + 3] ^ s[k + 5]);
  }
  s.resize(n);
  return s;
}

std::vector<int> levels(const std::vector<CellState>& states) {
  std::vector<int> out;
  for (CellState s : states) out.push_back(read_level(s));
  return out;
}

}  // namespace

TEST_CASE("encode_text") {
  CHECK(encode_text("BASILIA").to_string() ==
        "01000010010000010101001101001001010011000100100101000001");
  CHECK(encode_text("").empty());
  CHECK(encode_text("A").to_string() == "01000001");
  CHECK_THROWS_AS(encode_text("caf\xc3\xa9"), Error);
  CHECK(decode_text(encode_text("hello")) == "hello");
}

TEST_CASE("keystream for seed 0x0001, frozen") {
  ScramblerConfig cfg;
  cfg.seed_base = 0x0001;
  // page 0 keeps the base seed
  CHECK(keystream(cfg, 0, 32).to_hex() == "80008016");
  CHECK(keystream(cfg, 0, 8).to_string() == "10000000");
}

TEST_CASE("keystream agrees with the recurrence for many seeds") {
  for (std::uint16_t seed : {0x0001, 0x0002, 0xACE1, 0xBEEF, 0xFFFF, 0x1234}) {
    Lfsr16 reg(seed, ScramblerConfig{}.tap_mask());
    const auto expected = recurrence_keystream(seed, 2000);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      REQUIRE(static_cast<int>(reg.next()) == expected[i]);
    }
  }
}

TEST_CASE("default taps have the maximal period") {
  ScramblerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  Lfsr16 reg(1, cfg.tap_mask());
  std::size_t period = 0;
  do {
    reg.next();
    ++period;
  } while (reg.state() != 1);
  CHECK(period == 65535);
  ScramblerConfig bad;
  bad.taps = {16, 8};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("page seeds never hit zero") {
  ScramblerConfig cfg;
  cfg.seed_base = 0x0005;
  CHECK(cfg.page_seed(5) == 1);
  CHECK(cfg.page_seed(4) == 1);
  CHECK(cfg.page_seed(0x10005) == 1);
  CHECK(cfg.page_seed(3) == 6);
}

TEST_CASE("scramble is an involution and exposes the keystream") {
  ScramblerConfig cfg;
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    BitVector b(1 + uniform_below(rng, 600));
    for (std::size_t k = 0; k < b.size(); ++k) b.set(k, uniform_below(rng, 2) == 1);
    CHECK(scramble(scramble(b, 7, cfg), 7, cfg) == b);
  }
  CHECK(scramble(BitVector(100), 3, cfg) == keystream(cfg, 3, 100));
}

TEST_CASE("keystream monobit balance") {
  const BitVector k = keystream(ScramblerConfig{}, 17, 10000);
  const double ones = static_cast<double>(k.popcount()) / 10000.0;
  CHECK(ones > 0.45);
  CHECK(ones < 0.55);
}

TEST_CASE("state mapping") {
  const MappingTable direct = MappingTable::direct();
  const MappedStates zeros = map_to_states(BitVector(57), direct);
  CHECK(zeros.states == std::vector<CellState>(19, CellState::P0));
  CHECK(zeros.pad_bits == 0);
  const MappedStates m = map_to_states(BitVector::from_string("111111001"), direct);
  CHECK(m.states == std::vector<CellState>{CellState::P7, CellState::P7, CellState::P1});
  const BitVector eight = BitVector::from_string("10110001");
  const MappedStates padded = map_to_states(eight, direct);
  CHECK(padded.pad_bits == 1);
  CHECK(unmap_states(padded.states, direct).slice(0, 8) == eight);

  std::array<CellState, 8> gray{CellState::P0, CellState::P1, CellState::P3, CellState::P2,
                                CellState::P7, CellState::P6, CellState::P4, CellState::P5};
  const MappingTable g = MappingTable::from_forward(gray);
  CHECK(unmap_states(map_to_states(eight, g).states, g).slice(0, 8) == eight);
  gray[1] = CellState::P0;
  CHECK_THROWS_AS(MappingTable::from_forward(gray), Error);
}

TEST_CASE("BASILIA through scrambler seed 0x2A at page 0, frozen") {
  ScramblerConfig cfg;
  cfg.seed_base = 0x2A;
  BitVector bits = encode_text("BASILIA");
  bits.resize(57, false);
  const MappedStates m = map_to_states(scramble(bits, 0, cfg), MappingTable::direct());
  REQUIRE(m.states.size() == 19);
  CHECK(levels(m.states) ==
        std::vector<int>{0, 5, 4, 4, 0, 5, 6, 7, 2, 3, 0, 5, 4, 3, 2, 2, 1, 4, 0});
}

TEST_CASE("page codec states match the fixture") {
  std::ifstream in(NANDGUARD_FIXTURES "/basilia_page0.txt");
  REQUIRE(in);
  std::string line, digits, histogram;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (digits.empty()) {
      digits = line;
    } else {
      histogram = line;
    }
  }
  const PageCodec codec(Geometry{}, CodecConfig{});
  const auto states = codec.states_for(codec.codeword(encode_text("BASILIA"), 0));
  REQUIRE(states.size() == digits.size());
  std::string got;
  for (CellState s : states) got.push_back("0123456789abcdef"[static_cast<unsigned>(s)]);
  CHECK(got == digits);

  std::istringstream hs(histogram);
  CellHistogram h;
  for (CellState s : states) h.add(s);
  for (std::size_t k = 0; k < 8; ++k) {
    std::size_t expected = 0;
    hs >> expected;
    CHECK(h.readable()[k] == expected);
  }
}

TEST_CASE("ecc_decode is bounded-distance") {
  const EccConfig ecc;
  Rng rng(21);
  BitVector ref(64);
  for (std::size_t i = 0; i < 64; ++i) ref.set(i, uniform_below(rng, 2) == 1);
  for (std::size_t k = 0; k <= 16; ++k) {
    BitVector read = ref;
    for (std::size_t i = 0; i < k; ++i) read.flip(i * 3);
    if (k <= 8) {
      const DecodeResult d = ecc_decode(read, ref, ecc);
      CHECK(d.corrections_used == k);
      CHECK(d.data == ref);
    } else {
      try {
        (void)ecc_decode(read, ref, ecc);
        FAIL("expected DecodeFailure");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecodeFailure);
      }
    }
  }
  CHECK_THROWS_AS(ecc_decode(BitVector(63), ref, ecc), Error);
  EccConfig bad;
  bad.t = 32;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("page codec round trip for random text") {
  const PageCodec codec(Geometry{}, CodecConfig{});
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const std::string text = testing::random_printable(rng, 0, 64);
    const std::uint64_t page = uniform_below(rng, 144);
    const BitVector cw = codec.codeword(encode_text(text), page);
    const auto states = codec.states_for(cw);
    CHECK(states.size() == 171);
    const BitVector sensed = sense_states(states);
    CHECK(codec.codeword_from_sensed(sensed) == cw);
    CHECK(decode_text(codec.payload_from_codeword(cw, page)) == text);
    CHECK(codec.sensed_reference(encode_text(text), page) == sensed.slice(0, 512));
  }
  CHECK_THROWS_AS(codec.codeword(BitVector(513), 0), Error);
  CHECK(codec.capacity_chars() == 64);
  CHECK(codec.content_sectors(56) == 1);
  CHECK(codec.content_sectors(65) == 2);
  CHECK(codec.evidence_sectors(8) == std::vector<std::size_t>{0});
  CHECK(codec.evidence_sectors(72) == std::vector<std::size_t>{0});
  CHECK(codec.evidence_sectors(96) == std::vector<std::size_t>{0});
  CHECK(codec.evidence_sectors(104) == std::vector<std::size_t>{0, 1});
  CHECK(codec.evidence_sectors(512).size() == 8);
}
