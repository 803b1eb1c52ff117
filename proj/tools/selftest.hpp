#pragma once

// Self-checks shared by `gelfond selftest` and the acceptance runner. Each
// returns a verdict plus a one-line detail; tolerances live in selftest.cpp.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gelfond::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// |S_{2^m}(x)| against the cosine product for several c, m ≤ 12.
CheckResult product_identity(std::uint64_t seed = 1);
/// F_{i+2^j} = F_i · F_{2^j}.
CheckResult two_multiplicativity(std::uint64_t seed = 2);
/// empirical_exponent(1/2, m = 24, 2^20 grid + periodic points).
CheckResult empirical_bound();
/// Howard mcm1/mcm2 against exhaustive cycle enumeration on G_2..G_6.
CheckResult mcm_oracle(int random_trials = 1000, std::uint64_t seed = 3);
/// mcm1 against Karp on random strongly connected digraphs.
CheckResult karp_crosscheck(int graphs = 1000, std::uint64_t seed = 4);
/// |MCM1(w + δ) − MCM1(w)| ≤ ‖δ‖∞ on G_10.
CheckResult perturbation_stability(int trials = 100, std::uint64_t seed = 5);
/// Haar coefficient decay for the truncated potentials.
CheckResult haar_tail_bound();

struct Suite {
  std::string name;
  std::function<CheckResult()> run;
};

/// Everything above with default arguments, fastest first.
std::vector<Suite> default_suites();

}  // namespace gelfond::selftest
