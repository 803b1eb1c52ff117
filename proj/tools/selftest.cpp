#include "selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "gelfond/debruijn.hpp"
#include "gelfond/maxplus.hpp"
#include "gelfond/potential.hpp"
#include "gelfond/sequence.hpp"
#include "gelfond/verify.hpp"
#include "oracles.hpp"

namespace gelfond::selftest {

namespace {

// Pinned tolerances.
constexpr double kProductRelTol = 1e-9;
constexpr double kMultiplicativityTol = 1e-12;
// Below 2^m times this, a double-precision direct sum cannot resolve 1e-9.
constexpr double kConditioningFloor = 1e-6;
constexpr double kOracleTol = 1e-12;
constexpr double kEmpiricalLo = 0.7924;
constexpr double kEmpiricalHi = 0.7926;
// Howard stops at relative improvement 2^-48; allow that much on both runs.
constexpr double kPerturbationSlack = 4 * 0x1p-48;

template <typename F>
CheckResult timed(std::string name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const std::vector<DyadicRational>& sample_parameters() {
  static const std::vector<DyadicRational> cs{DyadicRational(1, 1), DyadicRational(1, 2),
                                              DyadicRational(3, 3), DyadicRational(192, 10)};
  return cs;
}

/// Weights of G_N for (c, d, d') = (1/2, 3, 3), integrated at a modest base level.
WeightedDigraph<double> half_graph(int N, int base_level = 20) {
  const auto spec = PotentialSpec::make(DyadicRational(1, 1), 3, 3);
  const auto cells = integrate_cylinders(spec, base_level, std::max(N, 3));
  return build_graph(haar_average(cells, N));
}

}  // namespace

CheckResult product_identity(std::uint64_t seed) {
  return timed("product identity", [&](CheckResult& r) {
    // x = k/2^40 so every phase n·x is exact. When |S| is far below the
    // cancellation floor of a double-precision sum of 2^m unit terms, the
    // direct sum is redone in 50-digit arithmetic.
    std::mt19937_64 rng(seed);
    double worst = 0;
    long cases = 0, extended = 0;
    for (const auto& c : sample_parameters()) {
      const WeightedSequenceSpec spec{c};
      for (int m = 1; m <= 12; ++m) {
        for (int i = 0; i < 1000; ++i) {
          const std::uint64_t k = rng() >> 24;
          const double x = std::ldexp(static_cast<double>(k), -40);
          const double closed = product_magnitude(spec, m, x);
          double direct = 0;
          if (closed > std::ldexp(kConditioningFloor, m)) {
            direct = std::abs(partial_sum(spec, std::uint64_t{1} << m, x));
          } else {
            direct = oracle::partial_sum_abs50(c, m, k);
            ++extended;
          }
          const double rel = closed > 0 ? std::fabs(direct - closed) / closed : std::fabs(direct);
          worst = std::max(worst, rel);
          ++cases;
        }
      }
    }
    r.passed = worst <= kProductRelTol;
    r.detail = std::to_string(cases) + " cases (" + std::to_string(extended) +
               " in 50-digit arithmetic), worst relative error " + fmt(worst);
  });
}

CheckResult two_multiplicativity(std::uint64_t seed) {
  return timed("2-multiplicativity", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (const auto& c : sample_parameters()) {
      const WeightedSequenceSpec spec{c};
      for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t k = rng() >> 24;  // x = k/2^40
        auto F = [&](std::uint64_t n) {
          const std::uint64_t phase = (n * k) & ((std::uint64_t{1} << 40) - 1);
          return weight(spec, n) * std::polar(1.0, 2 * std::numbers::pi * std::ldexp(static_cast<double>(phase), -40));
        };
        const int j = 1 + static_cast<int>(rng() % 12);
        const std::uint64_t i = rng() % (std::uint64_t{1} << j);
        worst = std::max(worst, std::abs(F(i + (std::uint64_t{1} << j)) - F(i) * F(std::uint64_t{1} << j)));
      }
    }
    r.passed = worst <= kMultiplicativityTol;
    r.detail = "worst |F(i+2^j) - F(i)F(2^j)| = " + fmt(worst);
  });
}

CheckResult empirical_bound() {
  return timed("empirical exponent", [&](CheckResult& r) {
    const double e = empirical_exponent({DyadicRational(1, 1)}, 24, std::uint64_t{1} << 20);
    r.passed = e >= kEmpiricalLo && e <= kEmpiricalHi;
    r.detail = "c=1/2, m=24: " + fmt(e) + " (log3/log4 = " + fmt(std::log(3.0) / std::log(4.0)) + ")";
  });
}

CheckResult mcm_oracle(int random_trials, std::uint64_t seed) {
  return timed("MCM oracle", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0;
    long instances = 0;
    std::string failure;

    for (int N = 2; N <= 6; ++N) {
      WeightedDigraph<double> g = half_graph(N);
      const auto cycles = oracle::simple_cycles(g);
      std::vector<std::vector<int>> sets;
      sets.reserve(cycles.size());
      for (const auto& cyc : cycles) sets.push_back(oracle::edge_set(cyc.edges));

      auto index_of = [&](const std::vector<int>& edges) -> long {
        const auto key = oracle::edge_set(edges);
        for (std::size_t i = 0; i < sets.size(); ++i) {
          if (sets[i] == key) return static_cast<long>(i);
        }
        return -1;
      };

      for (int trial = 0; trial <= random_trials; ++trial) {
        if (trial > 0) {
          for (int e = 0; e < g.edge_count(); ++e) g.weight[e] = U(rng);
        }
        const auto best = oracle::best_cycles(cycles, g.weight);
        const auto result = gap(DigraphView<double>(g));
        ++instances;

        // Means.
        const double d1 = std::fabs(result.lambda1 - best.mean);
        const double d2 = std::fabs(result.lambda2 - best.runner_up);
        worst = std::max({worst, d1, d2});
        // Attaining cycles: Howard's cycles must be simple cycles whose
        // oracle-evaluated means are optimal (ties allowed).
        const long i1 = index_of(result.gamma1.edge_ids);
        const long i2 = index_of(result.gamma2.edge_ids);
        const bool ok1 = i1 >= 0 && std::fabs(oracle::mean(cycles[static_cast<std::size_t>(i1)], g.weight) - best.mean) <= kOracleTol;
        bool ok2 = i2 >= 0 && i2 != i1 &&
                   std::fabs(oracle::mean(cycles[static_cast<std::size_t>(i2)], g.weight) - best.runner_up) <= kOracleTol;
        if ((d1 > kOracleTol || d2 > kOracleTol || !ok1 || !ok2) && failure.empty()) {
          failure = " first failure at N=" + std::to_string(N) + " trial " + std::to_string(trial);
        }
      }
    }
    r.passed = failure.empty() && worst <= kOracleTol;
    r.detail = std::to_string(instances) + " instances on G_2..G_6, worst mean error " + fmt(worst) + failure;
  });
}

CheckResult karp_crosscheck(int graphs, std::uint64_t seed) {
  return timed("Karp cross-check", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0;
    for (int k = 0; k < graphs; ++k) {
      const int n = 1 + static_cast<int>(rng() % 64);
      // A random Hamiltonian cycle makes it strongly connected; extra edges
      // (including loops and parallel edges) on top.
      std::vector<int> perm(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Edge> edges;
      for (int i = 0; i < n; ++i) {
        edges.push_back({perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>((i + 1) % n)], U(rng)});
      }
      const int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(3 * n + 1));
      for (int i = 0; i < extra; ++i) {
        edges.push_back({static_cast<int>(rng() % static_cast<std::uint64_t>(n)),
                         static_cast<int>(rng() % static_cast<std::uint64_t>(n)), U(rng)});
      }
      const auto g = WeightedDigraph<double>::from_edges(n, edges);
      const double howard = mcm1(DigraphView<double>(g)).mean;
      worst = std::max(worst, std::fabs(howard - oracle::karp_max_mean(g)));
    }
    r.passed = worst <= kOracleTol;
    r.detail = std::to_string(graphs) + " graphs, worst |Howard - Karp| = " + fmt(worst);
  });
}

CheckResult perturbation_stability(int trials, std::uint64_t seed) {
  return timed("perturbation stability", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(-8.0, -1.0);
    const WeightedDigraph<double> base = half_graph(10, 22);
    const double lambda = mcm1(DigraphView<double>(base)).mean;
    double worst_ratio = 0;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
      WeightedDigraph<double> g = base;
      const double radius = std::pow(10.0, scale(rng));
      double norm = 0;
      for (int e = 0; e < g.edge_count(); ++e) {
        const double delta = radius * U(rng);
        g.weight[e] += delta;
        norm = std::max(norm, std::fabs(delta));
      }
      const double moved = mcm1(DigraphView<double>(g)).mean;
      const double change = std::fabs(moved - lambda);
      const double slack = kPerturbationSlack * (std::fabs(lambda) + std::fabs(moved));
      if (change > norm + slack) ++violations;
      worst_ratio = std::max(worst_ratio, change / norm);
    }
    r.passed = violations == 0;
    r.detail = std::to_string(trials) + " perturbations of G_10, max |dλ|/|δ| = " + fmt(worst_ratio) +
               ", violations " + std::to_string(violations);
  });
}

CheckResult haar_tail_bound() {
  return timed("Haar tail bound", [&](CheckResult& r) {
    double worst_ratio = 0;
    int specs = 0;
    bool ok = true;
    for (const auto& c : {DyadicRational(1, 1), DyadicRational(1, 2)}) {
      for (int d = 3; d <= 5; ++d) {
        for (int dp = d; dp <= 8; ++dp) {
          const auto resolved = resolve_spec(c, d, dp, true);
          if (!resolved) continue;
          ++specs;
          const auto cells = integrate_cylinders(resolved->spec, 24, 13);
          for (int k = 5; k <= 12; ++k) {
            const Eigen::VectorXd coef = haar_coefficients(cells, k);
            // Error of each coefficient: 2^{k+1} times both halves' bounds.
            const CylinderIntegrals halves = coarsen(cells, k + 1);
            const double err = std::ldexp(2 * halves.epsilon.maxCoeff(), k + 1);
            const double bound = tail_bound(d, k, 1.0);
            const double observed = coef.cwiseAbs().maxCoeff() + err;
            worst_ratio = std::max(worst_ratio, observed / bound);
            ok = ok && observed <= bound;
          }
        }
      }
    }
    r.passed = ok && specs > 0;
    r.detail = std::to_string(specs) + " potentials, k=5..12, max (|c_w|+err)/bound = " + fmt(worst_ratio);
  });
}

std::vector<Suite> default_suites() {
  return {
      {"two-multiplicativity", [] { return two_multiplicativity(); }},
      {"karp", [] { return karp_crosscheck(); }},
      {"perturbation", [] { return perturbation_stability(); }},
      {"haar-tail", [] { return haar_tail_bound(); }},
      {"product-identity", [] { return product_identity(); }},
      {"empirical", [] { return empirical_bound(); }},
      {"mcm-oracle", [] { return mcm_oracle(); }},
  };
}

}  // namespace gelfond::selftest
