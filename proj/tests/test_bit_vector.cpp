#include <doctest.h>

#include "nandguard/bit_vector.hpp"
#include "nandguard/error.hpp"

using namespace nandguard;

TEST_CASE("bit vector parsing and formatting") {
  const BitVector v = BitVector::from_string("1010 0001");
  CHECK(v.size() == 8);
  CHECK(v.to_string() == "10100001");
  CHECK(v.to_hex() == "a1");
  CHECK(BitVector::from_hex("a1") == v);
  CHECK(BitVector::from_string("101").to_hex() == "a");
  CHECK_THROWS_AS(BitVector::from_string("10x"), Error);
}

TEST_CASE("xor and distance require equal lengths") {
  const BitVector a{1, 0, 1, 1};
  const BitVector b{0, 0, 1, 0};
  CHECK((a ^ b).to_string() == "1001");
  CHECK(hamming_distance(a, b) == 2);
  try {
    (void)hamming_distance(a, BitVector{1, 0});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("slice, complement, popcount") {
  const BitVector v = BitVector::from_string("11010");
  CHECK(v.slice(1, 3).to_string() == "101");
  CHECK(v.complement().to_string() == "00101");
  CHECK(v.popcount() == 3);
  CHECK_THROWS_AS(v.slice(3, 3), Error);
  CHECK(v.slice(5, 0).empty());
}
