#include "doctest.h"

#include <set>

#include "gelfond/debruijn.hpp"
#include "oracles.hpp"

using namespace gelfond;

namespace {

std::vector<BinaryWord> labels(const WeightedDigraph<double>& g, const std::vector<int>& edges) {
  std::vector<BinaryWord> out;
  for (int e : edges) out.push_back(g.label[static_cast<std::size_t>(e)]);
  return out;
}

/// Independent count of simple cycles: every vertex sequence, brute force.
long brute_force_cycle_count(const WeightedDigraph<double>& g) {
  const int n = g.vertex_count;
  long count = 0;
  // Multiplicity of edges u -> v.
  std::vector<std::vector<int>> mult(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int e = 0; e < g.edge_count(); ++e) {
    ++mult[static_cast<std::size_t>(g.source[static_cast<std::size_t>(e)])][static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)])];
  }
  // Subsets with a fixed smallest vertex, then every ordering of the rest.
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> vs;
    for (int v = 0; v < n; ++v) {
      if (mask >> v & 1) vs.push_back(v);
    }
    std::vector<int> rest(vs.begin() + 1, vs.end());
    do {
      std::vector<int> cyc{vs[0]};
      cyc.insert(cyc.end(), rest.begin(), rest.end());
      long ways = 1;
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        ways *= mult[static_cast<std::size_t>(cyc[i])][static_cast<std::size_t>(cyc[(i + 1) % cyc.size()])];
      }
      count += ways;
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  return count;
}

}  // namespace

TEST_CASE("quotient de Bruijn graph shape") {
  const auto g2 = quotient_debruijn(2);
  CHECK(g2.vertex_count == 1);
  CHECK(g2.edge_count() == 3);
  const auto g3 = quotient_debruijn(3);
  CHECK(g3.vertex_count == 3);
  CHECK(g3.edge_count() == 7);
  for (int N = 2; N <= 12; ++N) {
    const auto g = quotient_debruijn(N);
    REQUIRE(g.vertex_count == (1 << (N - 1)) - 1);
    REQUIRE(g.edge_count() == (1 << N) - 1);
    REQUIRE(is_strongly_connected(g));
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto w = g.label[static_cast<std::size_t>(e)];
      REQUIRE(g.source[static_cast<std::size_t>(e)] == quotient_vertex(w.prefix(N - 1).bits(), N));
      REQUIRE(g.target[static_cast<std::size_t>(e)] == quotient_vertex(w.suffix(N - 1).bits(), N));
    }
  }
  CHECK_THROWS(quotient_debruijn(1));
}

TEST_CASE("G_10 with c = 1/2 weights") {
  const auto spec = PotentialSpec::make(DyadicRational::parse("1/2"), 3, 3);
  const auto g = build_graph(haar_average(integrate_cylinders(spec, 18, 10), 10));
  CHECK(g.vertex_count == 511);
  CHECK(g.edge_count() == 1023);
  CHECK(is_strongly_connected(g));
  // The error bound shrinks about 2x per refinement of the integration grid.
  const auto fine = build_graph(haar_average(integrate_cylinders(spec, 24, 10), 10));
  MESSAGE("epsilon at levels 18 and 24: " << g.epsilon.maxCoeff() << ", " << fine.epsilon.maxCoeff());
  CHECK(fine.epsilon.maxCoeff() < g.epsilon.maxCoeff() / 16);
}

TEST_CASE("merged loop weights must agree") {
  CylinderAverages w;
  w.level = 2;
  w.weight = Eigen::VectorXd::Zero(4);
  w.lower = w.weight;
  w.upper = w.weight;
  w.epsilon = Eigen::VectorXd::Constant(4, 1e-12);
  w.weight[3] = 1.0;
  CHECK_THROWS_AS(build_graph(w), WeightMismatch);
  w.weight[3] = 1e-13;
  const auto g = build_graph(w);
  CHECK(g.weight[0] == doctest::Approx(5e-14));
}

TEST_CASE("simple cycle counts agree with brute force") {
  for (int N = 2; N <= 4; ++N) {
    const auto g = quotient_debruijn(N);
    CHECK(static_cast<long>(oracle::simple_cycles(g).size()) == brute_force_cycle_count(g));
  }
  CHECK(oracle::simple_cycles(quotient_debruijn(3)).size() == 6);
}

TEST_CASE("cycle_to_code") {
  const auto g2 = quotient_debruijn(2);
  CHECK(cycle_to_code(labels(g2, {0})).to_string() == "0");
  CHECK(cycle_to_code(labels(g2, {1, 2})).to_string() == "01");
  const auto g3 = quotient_debruijn(3);
  // 001 -> 010 -> 100
  CHECK(cycle_to_code(labels(g3, {1, 2, 4})).to_string() == "001");
  CHECK(cycle_to_code(labels(g3, {2, 4, 1})).to_string() == "001");
  CHECK_THROWS_AS(cycle_to_code(labels(g3, {1, 4})), NotACycle);
  CHECK_THROWS_AS(cycle_to_code(std::vector<BinaryWord>{}), NotACycle);
}

// Gluing 1^N onto 0^N creates closed walks whose labels do not chain (the
// lone loop 01 in G_2, say); those must be rejected, the rest must close up.
TEST_CASE("every chaining simple cycle maps to a doubling-invariant orbit") {
  for (int N = 2; N <= 5; ++N) {
    const auto g = quotient_debruijn(N);
    int chaining = 0;
    for (const auto& cyc : oracle::simple_cycles(g)) {
      BinaryWord code;
      try {
        code = cycle_to_code(labels(g, cyc.edges));
      } catch (const NotACycle&) {
        continue;
      }
      ++chaining;
      const auto orbit = code_to_orbit(code);
      std::set<OrbitPoint> a(orbit.begin(), orbit.end()), b;
      for (const auto& p : orbit) b.insert(p.doubled());
      REQUIRE(a == b);
      REQUIRE(code == code.least_rotation());
    }
    CHECK(chaining > 0);
  }
}

TEST_CASE("code_to_walk retraces the cycle") {
  const auto g = quotient_debruijn(6);
  for (const char* text : {"01", "011", "0111", "00101", "0", "1"}) {
    const auto code = BinaryWord::parse(text);
    const auto walk = code_to_walk(code, 6);
    CHECK(walk.size() == static_cast<std::size_t>(code.length()));
    for (std::size_t i = 0; i < walk.size(); ++i) {
      CHECK(g.target[static_cast<std::size_t>(walk[i])] == g.source[static_cast<std::size_t>(walk[(i + 1) % walk.size()])]);
    }
    CHECK(cycle_to_code(labels(g, walk)) == (code.is_constant() ? BinaryWord::zeros(1) : code.least_rotation()));
  }
}

TEST_CASE("lifted policies pick an out-edge of each vertex") {
  for (int N = 3; N <= 10; ++N) {
    const auto coarse = quotient_debruijn(N - 1);
    const auto fine = quotient_debruijn(N);
    std::vector<int> policy(static_cast<std::size_t>(coarse.vertex_count));
    for (int v = 0; v < coarse.vertex_count; ++v) {
      policy[static_cast<std::size_t>(v)] = coarse.out(v)[static_cast<std::size_t>(v % 2)];
    }
    const auto lifted = lift_policy(policy, N);
    REQUIRE(lifted.size() == static_cast<std::size_t>(fine.vertex_count));
    for (int v = 0; v < fine.vertex_count; ++v) {
      const int e = lifted[static_cast<std::size_t>(v)];
      REQUIRE(e >= 0);
      REQUIRE(e < fine.edge_count());
      REQUIRE(fine.source[static_cast<std::size_t>(e)] == v);
    }
  }
}

TEST_CASE("edge removal") {
  const auto g2 = quotient_debruijn(2);
  const auto without_loop = remove_edge(g2, 0);
  CHECK_FALSE(without_loop.active(0));
  CHECK(without_loop.active(1));
  CHECK(oracle::simple_cycles(g2).size() == 3);
  CHECK_THROWS_AS(remove_edge(g2, 3), std::out_of_range);
  const auto twice = remove_edge(remove_edge(g2, 1), 1);
  CHECK(twice.removed.size() == 1);
}

TEST_CASE("graph dump format") {
  const auto g = quotient_debruijn(2);
  std::ostringstream os;
  write_graph_dump(os, g);
  const std::string text = os.str();
  CHECK(text.find("01 0 0 0") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
