#include "gelfond/dyadic.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace gelfond {

namespace {

using u128 = unsigned __int128;

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

DyadicRational::DyadicRational(std::uint64_t numerator, unsigned level)
    : numerator_(numerator), level_(level) {
  if (level > kMaxLevel) {
    throw std::invalid_argument("dyadic level exceeds 62");
  }
  if (numerator >= (std::uint64_t{1} << level)) {
    throw std::invalid_argument("dyadic numerator must be < 2^level");
  }
}

DyadicRational DyadicRational::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw std::invalid_argument("expected NUM/DEN, got '" + std::string(text) + "'");
  }
  std::uint64_t num = parse_u64(text.substr(0, slash));
  std::uint64_t den = parse_u64(text.substr(slash + 1));
  if (den == 0 || !std::has_single_bit(den)) {
    throw std::invalid_argument("denominator must be a power of two");
  }
  return DyadicRational(num, static_cast<unsigned>(std::countr_zero(den)));
}

double DyadicRational::to_double() const {
  return std::ldexp(static_cast<double>(numerator_), -static_cast<int>(level_));
}

long double DyadicRational::to_long_double() const {
  return std::ldexp(static_cast<long double>(numerator_), -static_cast<int>(level_));
}

DyadicRational DyadicRational::reduced() const {
  if (numerator_ == 0) return DyadicRational(0, 0);
  unsigned shift = std::min<unsigned>(std::countr_zero(numerator_), level_);
  return DyadicRational(numerator_ >> shift, level_ - shift);
}

DyadicRational DyadicRational::at_level(unsigned level) const {
  DyadicRational r = reduced();
  if (level < r.level_) {
    throw std::invalid_argument("value not representable at requested level");
  }
  return DyadicRational(r.numerator_ << (level - r.level_), level);
}

DyadicRational DyadicRational::complement() const {
  if (numerator_ == 0) return *this;
  return DyadicRational(denominator() - numerator_, level_);
}

DyadicRational DyadicRational::plus(const DyadicRational& other) const {
  unsigned level = std::max(level_, other.level_);
  u128 a = u128{numerator_} << (level - level_);
  u128 b = u128{other.numerator_} << (level - other.level_);
  u128 mod = u128{1} << level;
  return DyadicRational(static_cast<std::uint64_t>((a + b) % mod), level).reduced();
}

DyadicRational DyadicRational::doubled() const {
  if (level_ == 0) return *this;
  std::uint64_t n = (numerator_ << 1) & (denominator() - 1);
  return DyadicRational(n, level_).reduced();
}

DyadicRational DyadicRational::midpoint(const DyadicRational& other) const {
  unsigned level = std::max(level_, other.level_);
  u128 a = u128{numerator_} << (level - level_);
  u128 b = u128{other.numerator_} << (level - other.level_);
  u128 sum = a + b;
  if ((sum & 1) == 0) {
    return DyadicRational(static_cast<std::uint64_t>(sum >> 1), level).reduced();
  }
  if (level + 1 > kMaxLevel) {
    throw std::overflow_error("dyadic midpoint needs level > 62");
  }
  return DyadicRational(static_cast<std::uint64_t>(sum), level + 1);
}

std::string DyadicRational::to_string() const {
  return std::to_string(numerator_) + "/" + std::to_string(denominator());
}

bool operator==(const DyadicRational& a, const DyadicRational& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
  unsigned level = std::max(a.level_, b.level_);
  u128 x = u128{a.numerator_} << (level - a.level_);
  u128 y = u128{b.numerator_} << (level - b.level_);
  return x <=> y;
}

}  // namespace gelfond
