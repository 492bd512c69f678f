#include "nandguard/bit_vector.hpp"

#include <algorithm>
#include <cctype>

#include "nandguard/error.hpp"

namespace nandguard {

BitVector::BitVector(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) bits_.push_back(b != 0 ? 1 : 0);
}

BitVector BitVector::from_string(std::string_view text) {
  BitVector out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::ParameterError,
                  std::string("invalid bit character '") + c + "'");
    }
  }
  return out;
}

BitVector BitVector::from_hex(std::string_view hex) {
  BitVector out;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw Error(ErrorCode::ParameterError,
                  std::string("invalid hex character '") + c + "'");
    }
    for (int shift = 3; shift >= 0; --shift) out.push_back(((v >> shift) & 1) != 0);
  }
  return out;
}

bool BitVector::at(std::size_t i) const {
  if (i >= bits_.size()) throw Error(ErrorCode::OutOfRange, "bit index");
  return bits_[i] != 0;
}

void BitVector::set(std::size_t i, bool value) {
  if (i >= bits_.size()) throw Error(ErrorCode::OutOfRange, "bit index");
  bits_[i] = value ? 1 : 0;
}

void BitVector::flip(std::size_t i) {
  if (i >= bits_.size()) throw Error(ErrorCode::OutOfRange, "bit index");
  bits_[i] ^= 1;
}

void BitVector::append(const BitVector& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitVector BitVector::slice(std::size_t offset, std::size_t length) const {
  if (offset > bits_.size() || length > bits_.size() - offset) {
    throw Error(ErrorCode::OutOfRange, "slice exceeds bit vector");
  }
  BitVector out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                   bits_.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return out;
}

BitVector BitVector::complement() const {
  BitVector out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

std::size_t BitVector::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::string BitVector::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < bits_.size(); i += 4) {
    int v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      v <<= 1;
      if (i + j < bits_.size()) v |= bits_[i + j];
    }
    s.push_back(kDigits[v]);
  }
  return s;
}

BitVector operator^(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "xor of unequal bit vectors");
  }
  BitVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] != b[i]);
  return out;
}

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "hamming distance of " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + " bits");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

}  // namespace nandguard
