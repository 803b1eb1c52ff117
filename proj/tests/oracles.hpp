#pragma once

// Independent reference computations: exhaustive simple-cycle enumeration,
// Karp's minimum-mean-cycle recurrence (max-plus form), and high-precision
// quadrature of the truncated potentials. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gelfond/debruijn.hpp"
#include "gelfond/dyadic.hpp"

namespace oracle {

/// A simple cycle as the list of edge ids it uses, starting at its smallest vertex.
struct Cycle {
  std::vector<int> edges;
};

/// Every simple cycle of a (multi)digraph. Each cycle is found exactly once,
/// from its smallest vertex, by DFS restricted to vertices above the start.
inline std::vector<Cycle> simple_cycles(const gelfond::WeightedDigraph<double>& g,
                                        std::size_t limit = 5'000'000) {
  std::vector<Cycle> out;
  const int n = g.vertex_count;
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::vector<int> path;

  for (int s = 0; s < n; ++s) {
    // Iterative DFS over (vertex, next out-edge index).
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    on_path[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      const auto outs = g.out(v);
      if (k == outs.size()) {
        on_path[static_cast<std::size_t>(v)] = 0;
        stack.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      const int e = outs[k++];
      const int t = g.target[static_cast<std::size_t>(e)];
      if (t == s) {
        Cycle c;
        c.edges = path;
        c.edges.push_back(e);
        out.push_back(std::move(c));
        if (out.size() > limit) throw std::runtime_error("too many cycles");
        continue;
      }
      if (t < s || on_path[static_cast<std::size_t>(t)]) continue;
      on_path[static_cast<std::size_t>(t)] = 1;
      path.push_back(e);
      stack.emplace_back(t, 0);
    }
  }
  return out;
}

inline double mean(const Cycle& c, const Eigen::VectorXd& w) {
  double s = 0;
  for (int e : c.edges) s += w[e];
  return s / static_cast<double>(c.edges.size());
}

/// Sorted edge set, for comparing cycles irrespective of starting point.
inline std::vector<int> edge_set(std::vector<int> edges) {
  std::sort(edges.begin(), edges.end());
  return edges;
}

struct Best {
  double mean = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  /// Second-best cycle mean over all cycles other than the best one.
  double runner_up = -std::numeric_limits<double>::infinity();
  /// Best and runner-up are separated (the maximiser is unique).
  double margin = 0;
};

inline Best best_cycles(const std::vector<Cycle>& cycles, const Eigen::VectorXd& w) {
  Best b;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const double m = mean(cycles[i], w);
    if (m > b.mean) {
      b.runner_up = b.mean;
      b.mean = m;
      b.index = i;
    } else if (m > b.runner_up) {
      b.runner_up = m;
    }
  }
  b.margin = b.mean - b.runner_up;
  return b;
}

/// Karp: λ = max_v min_{k<n} (D_n(v) − D_k(v)) / (n − k), with D_k(v) the
/// heaviest k-edge walk from vertex 0 to v. Needs strong connectivity.
inline double karp_max_mean(const gelfond::WeightedDigraph<double>& g) {
  const int n = g.vertex_count;
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(n), ninf));
  D[0][0] = 0;
  for (int k = 1; k <= n; ++k) {
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto s = static_cast<std::size_t>(g.source[static_cast<std::size_t>(e)]);
      const auto t = static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)]);
      if (D[k - 1][s] == ninf) continue;
      D[k][t] = std::max(D[k][t], D[k - 1][s] + g.weight[e]);
    }
  }
  double best = ninf;
  for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) {
    if (D[static_cast<std::size_t>(n)][v] == ninf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (D[static_cast<std::size_t>(k)][v] == ninf) continue;
      worst = std::min(worst, (D[static_cast<std::size_t>(n)][v] - D[static_cast<std::size_t>(k)][v]) / (n - k));
    }
    best = std::max(best, worst);
  }
  return best;
}

using Float50 = boost::multiprecision::cpp_bin_float_50;

/// log |cos π(x + c)| clipped below at log sin(π/2^d), 50 digits.
inline Float50 g_d(Float50 x, const Float50& c, int d) {
  using boost::multiprecision::cos;
  using boost::multiprecision::log;
  using boost::multiprecision::sin;
  using boost::multiprecision::abs;
  const Float50 pi = boost::math::constants::pi<Float50>();
  const Float50 floor_value = log(sin(pi / Float50(std::ldexp(1.0, d))));
  const Float50 v = abs(cos(pi * (x + c)));
  if (v == 0) return floor_value;
  return std::max(log(v), floor_value);
}

/// g_{d,d'}: the last 2^−d' of the circle is reflected onto the first.
inline Float50 g_dd(const Float50& x, const Float50& c, int d, int dprime) {
  if (x >= 1 - Float50(std::ldexp(1.0, -dprime))) return g_d(1 - x, c, d);
  return g_d(x, c, d);
}

/// ∫_a^b g_{d,d'} by adaptive Gauss–Kronrod in 50-digit arithmetic, split at
/// every kink of the integrand so each piece is analytic.
inline Float50 integral_g_dd(const gelfond::DyadicRational& c_dyadic, int d, int dprime,
                             const Float50& a, const Float50& b) {
  const Float50 c = Float50(c_dyadic.numerator()) / Float50(c_dyadic.denominator());
  const Float50 clip = Float50(std::ldexp(1.0, -d));
  std::vector<Float50> cuts{a, b};
  auto add = [&](Float50 p) {
    p -= boost::multiprecision::floor(p);
    if (p > a && p < b) cuts.push_back(p);
    if (1 - p > a && 1 - p < b) cuts.push_back(1 - p);
  };
  // Pole of g at x + c = 1/2, clip points at distance 2^−d, the zero of the
  // cosine argument, for both x and its reflection 1 − x.
  for (const Float50& base : {Float50(0.5) - c, Float50(1.5) - c}) {
    add(base);
    add(base - clip);
    add(base + clip);
  }
  add(1 - c);
  add(Float50(2) - c);
  cuts.push_back(std::clamp(1 - Float50(std::ldexp(1.0, -dprime)), a, b));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Float50 total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Float50 lo = cuts[i];
    const Float50 hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const Float50 mid = (lo + hi) / 2;
    const bool tail = mid >= 1 - Float50(std::ldexp(1.0, -dprime));
    auto f = [&](const Float50& x) { return tail ? g_d(1 - x, c, d) : g_d(x, c, d); };
    total += boost::math::quadrature::gauss_kronrod<Float50, 31>::integrate(f, lo, hi, 12,
                                                                           Float50("1e-40"));
  }
  return total;
}

/// |Σ_{n<2^m} e^{2πi(c·s(n) + n·x)}| for x = x_num/2^40 in 50-digit
/// arithmetic. e^{2πinx} is advanced by repeated multiplication (error
/// ~n·10^−50) and e^{2πic·s} comes from a table of the few digit sums.
inline double partial_sum_abs50(const gelfond::DyadicRational& c, int m, std::uint64_t x_num) {
  if (m < 0 || m > 24) throw std::invalid_argument("partial_sum_abs50: m out of range");
  using boost::multiprecision::cos;
  using boost::multiprecision::sin;
  const Float50 two_pi = 2 * boost::math::constants::pi<Float50>();
  const Float50 x = Float50(x_num) / Float50(std::ldexp(1.0, 40));
  const Float50 cv = Float50(c.numerator()) / Float50(c.denominator());
  std::vector<Float50> tre, tim;
  for (int s = 0; s <= m; ++s) {
    tre.push_back(cos(two_pi * cv * s));
    tim.push_back(sin(two_pi * cv * s));
  }
  const Float50 zr = cos(two_pi * x), zi = sin(two_pi * x);
  Float50 pr = 1, pi = 0, re = 0, im = 0;
  for (std::uint64_t n = 0; n < (std::uint64_t{1} << m); ++n) {
    const auto s = static_cast<std::size_t>(__builtin_popcountll(n));
    re += tre[s] * pr - tim[s] * pi;
    im += tre[s] * pi + tim[s] * pr;
    const Float50 nr = pr * zr - pi * zi;
    pi = pr * zi + pi * zr;
    pr = nr;
  }
  return static_cast<double>(boost::multiprecision::sqrt(re * re + im * im));
}

}  // namespace oracle
