#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace nandguard {

// Ordered sequence of bits with value semantics. One byte per bit; the
// simulator works at desk scale where clarity beats packing.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false)
      : bits_(size, value ? 1 : 0) {}
  BitVector(std::initializer_list<int> bits);

  // Parses '0'/'1' characters; whitespace is ignored. Throws ParameterError
  // on any other character.
  static BitVector from_string(std::string_view text);
  static BitVector from_hex(std::string_view hex);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool value);
  void flip(std::size_t i);
  void push_back(bool value) { bits_.push_back(value ? 1 : 0); }
  void append(const BitVector& other);
  void resize(std::size_t size, bool value = false) {
    bits_.resize(size, value ? 1 : 0);
  }

  BitVector slice(std::size_t offset, std::size_t length) const;
  BitVector complement() const;

  std::size_t popcount() const noexcept;

  std::string to_string() const;
  // MSB-first nibbles; a trailing partial nibble is zero-padded on the right.
  std::string to_hex() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BitVector operator^(const BitVector& a, const BitVector& b);

// Number of differing positions. Throws LengthMismatch on unequal sizes.
std::size_t hamming_distance(const BitVector& a, const BitVector& b);

}  // namespace nandguard
