#include "gelfond/word.hpp"

#include <algorithm>
#include <stdexcept>

namespace gelfond {

namespace {

std::uint64_t mask_of(int length) {
  return length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
}

}  // namespace

BinaryWord::BinaryWord(std::uint64_t bits, int length) : bits_(bits), length_(length) {
  if (length < 0 || length > kMaxLength) {
    throw std::invalid_argument("binary word length out of range");
  }
  if ((bits & ~mask_of(length)) != 0) {
    throw std::invalid_argument("binary word has bits beyond its length");
  }
}

BinaryWord BinaryWord::parse(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxLength)) {
    throw std::invalid_argument("binary word too long");
  }
  std::uint64_t bits = 0;
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("binary word must contain only 0 and 1");
    }
    bits = (bits << 1) | static_cast<std::uint64_t>(ch - '0');
  }
  return BinaryWord(bits, static_cast<int>(text.size()));
}

BinaryWord BinaryWord::ones(int length) { return BinaryWord(mask_of(length), length); }

BinaryWord BinaryWord::prefix(int n) const {
  if (n < 0 || n > length_) throw std::out_of_range("prefix length");
  return BinaryWord(bits_ >> (length_ - n), n);
}

BinaryWord BinaryWord::suffix(int n) const {
  if (n < 0 || n > length_) throw std::out_of_range("suffix length");
  return BinaryWord(bits_ & mask_of(n), n);
}

BinaryWord BinaryWord::append(int bit) const {
  return BinaryWord((bits_ << 1) | static_cast<std::uint64_t>(bit & 1), length_ + 1);
}

bool BinaryWord::is_constant() const {
  return bits_ == 0 || bits_ == mask_of(length_);
}

BinaryWord BinaryWord::complement() const {
  return BinaryWord(~bits_ & mask_of(length_), length_);
}

BinaryWord BinaryWord::rotated(int k) const {
  if (length_ == 0) return *this;
  k %= length_;
  if (k == 0) return *this;
  std::uint64_t m = mask_of(length_);
  return BinaryWord(((bits_ << k) | (bits_ >> (length_ - k))) & m, length_);
}

BinaryWord BinaryWord::least_rotation() const {
  BinaryWord best = *this;
  for (int k = 1; k < length_; ++k) {
    BinaryWord r = rotated(k);
    if (r.bits_ < best.bits_) best = r;
  }
  return best;
}

std::string BinaryWord::to_string() const {
  std::string s(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i) {
    if (at(i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

OrbitPoint OrbitPoint::doubled() const {
  std::uint64_t den = denominator();
  if (den == 1) return *this;
  unsigned __int128 k = static_cast<unsigned __int128>(numerator) * 2;
  return OrbitPoint{static_cast<std::uint64_t>(k % den), period};
}

OrbitPoint OrbitPoint::reflected() const {
  if (numerator == 0) return *this;
  return OrbitPoint{denominator() - numerator, period};
}

std::vector<OrbitPoint> code_to_orbit(const BinaryWord& code) {
  if (code.length() < 1) throw std::invalid_argument("orbit code must be non-empty");
  const int p = code.length();
  const std::uint64_t den = (std::uint64_t{1} << p) - 1;
  std::vector<OrbitPoint> points;
  points.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    // k = den means the point 1, which is 0 on the circle.
    std::uint64_t k = code.rotated(j).bits() % den;
    points.push_back(OrbitPoint{k, p});
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace gelfond
