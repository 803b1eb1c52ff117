#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gelfond/dyadic.hpp"

namespace gelfond {

/// A binary word of length <= 62, most significant bit first.
///
/// The word ω = b_1 … b_n names the cylinder [int(ω)/2^n, (int(ω)+1)/2^n).
class BinaryWord {
 public:
  static constexpr int kMaxLength = 62;

  constexpr BinaryWord() = default;
  BinaryWord(std::uint64_t bits, int length);

  /// Parses a string of '0'/'1' characters.
  static BinaryWord parse(std::string_view text);
  static BinaryWord zeros(int length) { return BinaryWord(0, length); }
  static BinaryWord ones(int length);

  std::uint64_t bits() const { return bits_; }
  int length() const { return length_; }
  bool empty() const { return length_ == 0; }

  /// i-th letter counted from the left, 0-based.
  int at(int i) const { return static_cast<int>((bits_ >> (length_ - 1 - i)) & 1); }
  int last() const { return static_cast<int>(bits_ & 1); }

  /// Initial subword of length n.
  BinaryWord prefix(int n) const;
  /// Final subword of length n.
  BinaryWord suffix(int n) const;
  BinaryWord append(int bit) const;

  bool is_constant() const;
  BinaryWord complement() const;
  BinaryWord rotated(int k) const;
  /// Lexicographically least rotation.
  BinaryWord least_rotation() const;

  DyadicRational cylinder_left() const {
    return DyadicRational(bits_, static_cast<unsigned>(length_));
  }

  std::string to_string() const;

  friend auto operator<=>(const BinaryWord&, const BinaryWord&) = default;

 private:
  std::uint64_t bits_ = 0;
  int length_ = 0;
};

/// Exact rational k / (2^p − 1), a point of a period-p orbit of x ↦ 2x mod 1.
struct OrbitPoint {
  std::uint64_t numerator = 0;
  int period = 1;

  std::uint64_t denominator() const { return (std::uint64_t{1} << period) - 1; }
  long double to_long_double() const {
    return static_cast<long double>(numerator) / static_cast<long double>(denominator());
  }
  OrbitPoint doubled() const;
  /// 1 − p, taken mod 1.
  OrbitPoint reflected() const;

  friend auto operator<=>(const OrbitPoint&, const OrbitPoint&) = default;
};

/// The p points k_j / (2^p − 1) where k_j are the integer values of the
/// rotations of the code, sorted ascending. Codes "0" and "1" both give {0}.
std::vector<OrbitPoint> code_to_orbit(const BinaryWord& code);

}  // namespace gelfond
