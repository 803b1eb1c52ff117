#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace gelfond {

/// Exact value numerator / 2^level in [0, 1).
///
/// The representation is not required to be reduced; comparison is by
/// value. Arithmetic wraps modulo 1 and never rounds.
class DyadicRational {
 public:
  static constexpr unsigned kMaxLevel = 62;

  constexpr DyadicRational() = default;

  /// Throws std::invalid_argument unless numerator < 2^level <= 2^62.
  DyadicRational(std::uint64_t numerator, unsigned level);

  /// Parses "NUM/DEN" where DEN is a power of two and NUM < DEN.
  static DyadicRational parse(std::string_view text);

  std::uint64_t numerator() const { return numerator_; }
  unsigned level() const { return level_; }
  std::uint64_t denominator() const { return std::uint64_t{1} << level_; }

  /// Exact for level <= 52.
  double to_double() const;
  long double to_long_double() const;

  DyadicRational reduced() const;
  /// Same value expressed at a finer level; throws if level is coarser than reduced().
  DyadicRational at_level(unsigned level) const;

  /// (1 - c) mod 1.
  DyadicRational complement() const;
  DyadicRational plus(const DyadicRational& other) const;
  DyadicRational doubled() const;
  /// Throws std::overflow_error when the result would need level > 62.
  DyadicRational midpoint(const DyadicRational& other) const;

  std::string to_string() const;

  friend bool operator==(const DyadicRational& a, const DyadicRational& b);
  friend std::strong_ordering operator<=>(const DyadicRational& a,
                                          const DyadicRational& b);

 private:
  std::uint64_t numerator_ = 0;
  unsigned level_ = 0;
};

/// Element of the max-plus semiring R ∪ {−∞}. Bottom is stored as −inf.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal bottom() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }
  static constexpr ExtendedReal unit() { return ExtendedReal(0.0); }

  constexpr bool is_bottom() const {
    return value_ == -std::numeric_limits<double>::infinity();
  }
  constexpr double value() const { return value_; }

  /// a ⊕ b = max(a, b)
  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    return a.value_ < b.value_ ? b : a;
  }
  /// a ⊗ b = a + b, absorbing at bottom
  friend constexpr ExtendedReal operator*(ExtendedReal a, ExtendedReal b) {
    if (a.is_bottom() || b.is_bottom()) return bottom();
    return ExtendedReal(a.value_ + b.value_);
  }
  friend constexpr bool operator==(ExtendedReal, ExtendedReal) = default;

 private:
  double value_ = 0.0;
};

}  // namespace gelfond
