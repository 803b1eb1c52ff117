#pragma once

// Weighted Thue-Morse sequences t^(c)(n) = e^{2πi c s(n)} and their
// exponential sums, used as a brute-force cross-check of certified exponents.

#include <complex>
#include <cstdint>
#include <vector>

#include "gelfond/dyadic.hpp"

namespace gelfond {

struct WeightedSequenceSpec {
  DyadicRational c;
};

/// Number of 1-bits of n.
int digit_sum(std::uint64_t n);

/// e^{2πi c s(n)}; the phase c·s(n) mod 1 is reduced exactly.
std::complex<double> weight(const WeightedSequenceSpec& spec, std::uint64_t n);

/// S_N(x) = Σ_{n<N} t^(c)(n) e^{2πinx}, by direct pairwise summation.
std::complex<double> partial_sum(const WeightedSequenceSpec& spec, std::uint64_t N, double x);

/// 2^m ∏_{j<m} |cos π(c + 2^j x)|.
double product_magnitude(const WeightedSequenceSpec& spec, int m, double x);

/// A rational x = num/den used as an evaluation point.
struct RationalPoint {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

/// Σ_{j<m} log|cos π(c + 2^j x)| for rational x, with 2^j x reduced exactly.
/// −∞ if the orbit hits the pole.
double log_product(const DyadicRational& c, int m, RationalPoint x);

/// Every periodic point k/(2^p − 1) of the doubling map with p ≤ max_period.
std::vector<RationalPoint> periodic_points(int max_period);

/// 1 + max_x log ∏|cos π(c+2^j x)| / (m log 2) over the grid {i/grid_size}
/// together with all periodic points of period ≤ 12. A lower bound for the
/// finite-m supremum.
double empirical_exponent(const WeightedSequenceSpec& spec, int m, std::uint64_t grid_size);

}  // namespace gelfond
