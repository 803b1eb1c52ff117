#include "gelfond/debruijn.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>

namespace gelfond {

namespace {

WeightedDigraph<double> skeleton(int order) {
  if (order < 2 || order > 30) throw std::invalid_argument("graph order must be in [2, 30]");
  WeightedDigraph<double> g;
  g.order = order;
  g.vertex_count = (1 << (order - 1)) - 1;
  const int edges = (1 << order) - 1;
  const std::uint64_t mask = (std::uint64_t{1} << (order - 1)) - 1;
  g.source.resize(static_cast<std::size_t>(edges));
  g.target.resize(static_cast<std::size_t>(edges));
  g.label.resize(static_cast<std::size_t>(edges));
  g.weight = Eigen::VectorXd::Zero(edges);
  g.epsilon = Eigen::VectorXd::Zero(edges);
  for (int e = 0; e < edges; ++e) {
    const auto w = static_cast<std::uint64_t>(e);
    g.source[static_cast<std::size_t>(e)] = quotient_vertex(w >> 1, order);
    g.target[static_cast<std::size_t>(e)] = quotient_vertex(w & mask, order);
    g.label[static_cast<std::size_t>(e)] = BinaryWord(w, order);
  }
  g.index();
  return g;
}

}  // namespace

WeightedDigraph<double> quotient_debruijn(int order) { return skeleton(order); }

WeightedDigraph<double> build_graph(const CylinderAverages& weights) {
  const int order = weights.level;
  WeightedDigraph<double> g = skeleton(order);
  const Eigen::Index last = weights.size() - 1;
  const Eigen::Index edges = g.edge_count();
  g.weight = weights.weight.head(edges);
  g.epsilon = weights.epsilon.head(edges);

  const double w0 = weights.weight[0];
  const double w1 = weights.weight[last];
  const double e0 = weights.epsilon[0];
  const double e1 = weights.epsilon[last];
  const double diff = std::fabs(w0 - w1);
  if (diff > e0 + e1) {
    throw WeightMismatch("constant-loop weights differ by " + std::to_string(diff) +
                         ", more than their error bound " + std::to_string(e0 + e1));
  }
  g.weight[0] = 0.5 * (w0 + w1);
  g.epsilon[0] = std::max(e0, e1) + 0.5 * diff;
  return g;
}

BinaryWord cycle_to_code(std::span<const BinaryWord> edge_labels) {
  const std::size_t p = edge_labels.size();
  if (p == 0) throw NotACycle("empty walk");
  const int n = edge_labels[0].length();
  if (n < 1) throw NotACycle("edge labels must be non-empty");
  for (const auto& w : edge_labels) {
    if (w.length() != n) throw NotACycle("edge labels differ in length");
  }

  std::vector<BinaryWord> resolved(edge_labels.begin(), edge_labels.end());
  std::size_t anchor = p;
  for (std::size_t i = 0; i < p; ++i) {
    if (!resolved[i].is_constant()) {
      anchor = i;
      break;
    }
  }
  if (anchor == p) {
    // Only the merged loop: the fixed point 0 ≡ 1.
    return BinaryWord::zeros(1);
  }
  // Constant labels are the merged loop; read them as whichever of 0^N, 1^N
  // continues the walk.
  for (std::size_t k = 1; k < p; ++k) {
    std::size_t i = (anchor + k) % p;
    if (!resolved[i].is_constant()) continue;
    const BinaryWord prev = resolved[(i + p - 1) % p].suffix(n - 1);
    if (n == 1 || prev == BinaryWord::zeros(n - 1)) {
      resolved[i] = BinaryWord::zeros(n);
    } else if (prev == BinaryWord::ones(n - 1)) {
      resolved[i] = BinaryWord::ones(n);
    } else {
      throw NotACycle("loop edge entered from a non-constant vertex");
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    const BinaryWord& a = resolved[i];
    const BinaryWord& b = resolved[(i + 1) % p];
    if (a.suffix(n - 1) != b.prefix(n - 1)) {
      throw NotACycle("labels " + a.to_string() + " and " + b.to_string() +
                      " do not overlap in " + std::to_string(n - 1) + " letters");
    }
  }
  if (p > static_cast<std::size_t>(BinaryWord::kMaxLength)) {
    throw std::length_error("cycle code longer than 62 letters");
  }
  std::uint64_t bits = 0;
  for (const auto& w : resolved) bits = (bits << 1) | static_cast<std::uint64_t>(w.last());
  BinaryWord code(bits, static_cast<int>(p));
  if (p == 1) return BinaryWord::zeros(1);
  return code.least_rotation();
}

bool is_strongly_connected(const WeightedDigraph<double>& g) {
  if (g.vertex_count == 0) return false;
  auto reach_all = [&](bool reverse) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.vertex_count));
    for (int e = 0; e < g.edge_count(); ++e) {
      int s = g.source[static_cast<std::size_t>(e)];
      int t = g.target[static_cast<std::size_t>(e)];
      if (reverse) std::swap(s, t);
      adj[static_cast<std::size_t>(s)].push_back(t);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          ++count;
          q.push(u);
        }
      }
    }
    return count == g.vertex_count;
  };
  return reach_all(false) && reach_all(true);
}

void write_graph_dump(std::ostream& os, const WeightedDigraph<double>& g) {
  char buf[64];
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto i = static_cast<std::size_t>(e);
    std::snprintf(buf, sizeof buf, "%.17g", g.weight[e]);
    os << (g.has_labels() ? g.label[i].to_string() : std::to_string(e)) << ' ' << g.source[i]
       << ' ' << g.target[i] << ' ' << buf << '\n';
  }
}

}  // namespace gelfond
