#include "gelfond/sequence.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gelfond {

namespace {

using u128 = unsigned __int128;
constexpr long double kPi = std::numbers::pi_v<long double>;

long double frac(long double v) { return v - std::floor(v); }

/// c·s mod 1, exact numerator over 2^level.
long double weight_phase(const DyadicRational& c, std::uint64_t s) {
  const u128 prod = static_cast<u128>(c.numerator()) * s;
  const std::uint64_t r = static_cast<std::uint64_t>(prod & (c.denominator() - 1));
  return std::ldexp(static_cast<long double>(r), -static_cast<int>(c.level()));
}

std::complex<long double> term(const DyadicRational& c, std::uint64_t n, long double x) {
  const long double phase = frac(weight_phase(c, static_cast<std::uint64_t>(digit_sum(n))) +
                                 frac(static_cast<long double>(n) * x));
  return std::polar(1.0L, 2 * kPi * phase);
}

std::complex<long double> pairwise(const DyadicRational& c, std::uint64_t lo, std::uint64_t hi,
                                   long double x) {
  if (hi - lo <= 64) {
    std::complex<long double> s = 0;
    for (std::uint64_t n = lo; n < hi; ++n) s += term(c, n, x);
    return s;
  }
  const std::uint64_t mid = lo + (hi - lo) / 2;
  return pairwise(c, lo, mid, x) + pairwise(c, mid, hi, x);
}

/// |cos π y| = sin(π · dist(y, 1/2 + Z)); y given as distance-to-half in [0, 1/2].
long double abs_cos_from_offset(long double t) { return std::sin(kPi * t); }

}  // namespace

int digit_sum(std::uint64_t n) { return std::popcount(n); }

std::complex<double> weight(const WeightedSequenceSpec& spec, std::uint64_t n) {
  const auto w = std::polar(1.0L, 2 * kPi * weight_phase(spec.c, static_cast<std::uint64_t>(digit_sum(n))));
  return {static_cast<double>(w.real()), static_cast<double>(w.imag())};
}

std::complex<double> partial_sum(const WeightedSequenceSpec& spec, std::uint64_t N, double x) {
  if (N < 1) throw std::invalid_argument("partial_sum needs N >= 1");
  const auto s = pairwise(spec.c, 0, N, static_cast<long double>(x));
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

double product_magnitude(const WeightedSequenceSpec& spec, int m, double x) {
  if (m < 1) throw std::invalid_argument("product_magnitude needs m >= 1");
  const long double c = spec.c.to_long_double();
  long double y = frac(static_cast<long double>(x));
  long double prod = 1;
  for (int j = 0; j < m; ++j) {
    prod *= abs_cos_from_offset(std::fabs(frac(c + y) - 0.5L));
    y = frac(2 * y);  // exact
  }
  return static_cast<double>(std::ldexp(prod, m));
}

double log_product(const DyadicRational& c, int m, RationalPoint x) {
  if (x.den == 0) throw std::invalid_argument("zero denominator");
  // y_j · 2D with D = den · 2^L, so that 1/2 sits at D.
  const u128 D = static_cast<u128>(x.den) << c.level();
  const u128 twoD = 2 * D;
  const u128 c_part = static_cast<u128>(c.numerator()) * x.den;
  u128 r = x.num % x.den;
  long double prod = 1;
  for (int j = 0; j < m; ++j) {
    const u128 y = (2 * (c_part + (r << c.level()))) % twoD;
    const u128 dist = y > D ? y - D : D - y;
    if (dist == 0) return -std::numeric_limits<double>::infinity();
    prod *= abs_cos_from_offset(static_cast<long double>(dist) / static_cast<long double>(twoD));
    r = (2 * r) % x.den;
  }
  return static_cast<double>(std::log(prod));
}

std::vector<RationalPoint> periodic_points(int max_period) {
  if (max_period < 1 || max_period > 30) throw std::invalid_argument("period must be in [1, 30]");
  std::vector<RationalPoint> out;
  for (int p = 1; p <= max_period; ++p) {
    const std::uint64_t den = (std::uint64_t{1} << p) - 1;
    for (std::uint64_t k = 0; k < den; ++k) out.push_back({k, den});
  }
  return out;
}

double empirical_exponent(const WeightedSequenceSpec& spec, int m, std::uint64_t grid_size) {
  if (m < 1) throw std::invalid_argument("empirical_exponent needs m >= 1");
  if (grid_size < 1) throw std::invalid_argument("grid_size must be positive");
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < grid_size; ++i) {
    best = std::max(best, log_product(spec.c, m, {i, grid_size}));
  }
  static const std::vector<RationalPoint> orbit_points = periodic_points(12);
  for (const auto& p : orbit_points) best = std::max(best, log_product(spec.c, m, p));
  return 1.0 + best / (m * std::numbers::ln2);
}

}  // namespace gelfond
