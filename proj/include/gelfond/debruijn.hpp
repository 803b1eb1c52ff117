#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gelfond/potential.hpp"
#include "gelfond/word.hpp"

namespace gelfond {

class WeightMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotACycle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  int source = 0;
  int target = 0;
  double weight = 0.0;
};

/// Directed multigraph with max-plus edge weights, stored as CSR out-lists.
///
/// Edge ids are positions in the edge arrays. Graphs built from Haar
/// averages also carry the word label and the weight error bound per edge.
template <typename Scalar = double>
struct WeightedDigraph {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int vertex_count = 0;
  int order = 0;  // N for a quotient de Bruijn graph, 0 otherwise
  std::vector<int> source;
  std::vector<int> target;
  Vector weight;
  Eigen::VectorXd epsilon;
  std::vector<BinaryWord> label;
  std::vector<int> out_offset;  // size vertex_count + 1
  std::vector<int> out_edges;

  int edge_count() const { return static_cast<int>(source.size()); }
  bool has_labels() const { return !label.empty(); }

  std::span<const int> out(int v) const {
    return {out_edges.data() + out_offset[static_cast<std::size_t>(v)],
            out_edges.data() + out_offset[static_cast<std::size_t>(v) + 1]};
  }

  /// Rebuilds the CSR index from source/target.
  void index() {
    out_offset.assign(static_cast<std::size_t>(vertex_count) + 1, 0);
    for (int s : source) ++out_offset[static_cast<std::size_t>(s) + 1];
    for (std::size_t v = 0; v < static_cast<std::size_t>(vertex_count); ++v) {
      out_offset[v + 1] += out_offset[v];
    }
    out_edges.assign(source.size(), 0);
    std::vector<int> fill(out_offset.begin(), out_offset.end() - 1);
    for (int e = 0; e < edge_count(); ++e) {
      out_edges[static_cast<std::size_t>(fill[static_cast<std::size_t>(source[static_cast<std::size_t>(e)])]++)] = e;
    }
  }

  static WeightedDigraph from_edges(int vertex_count, std::span<const Edge> edges) {
    WeightedDigraph g;
    g.vertex_count = vertex_count;
    g.weight.resize(static_cast<Eigen::Index>(edges.size()));
    g.epsilon = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].source < 0 || edges[i].source >= vertex_count || edges[i].target < 0 ||
          edges[i].target >= vertex_count) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      g.source.push_back(edges[i].source);
      g.target.push_back(edges[i].target);
      g.weight[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(edges[i].weight);
    }
    g.index();
    return g;
  }
};

/// A graph with some edges masked out. Shares the base graph read-only.
template <typename Scalar = double>
struct DigraphView {
  const WeightedDigraph<Scalar>* graph = nullptr;
  std::vector<int> removed;  // sorted

  DigraphView() = default;
  DigraphView(const WeightedDigraph<Scalar>& g) : graph(&g) {}  // NOLINT(implicit)

  bool active(int e) const {
    if (removed.empty()) return true;
    return !std::binary_search(removed.begin(), removed.end(), e);
  }
  int vertex_count() const { return graph->vertex_count; }
};

/// Same vertices, edge `e` dropped.
template <typename Scalar>
DigraphView<Scalar> remove_edge(const DigraphView<Scalar>& view, int e) {
  if (e < 0 || e >= view.graph->edge_count()) throw std::out_of_range("edge index");
  DigraphView<Scalar> out = view;
  auto it = std::lower_bound(out.removed.begin(), out.removed.end(), e);
  if (it == out.removed.end() || *it != e) out.removed.insert(it, e);
  return out;
}

template <typename Scalar>
DigraphView<Scalar> remove_edge(const WeightedDigraph<Scalar>& g, int e) {
  return remove_edge(DigraphView<Scalar>(g), e);
}

/// Vertex id of an (N−1)-bit word in G_N: the all-ones word is glued to 0.
inline int quotient_vertex(std::uint64_t word, int order) {
  const std::uint64_t ones = (std::uint64_t{1} << (order - 1)) - 1;
  return word == ones ? 0 : static_cast<int>(word);
}

/// Order-N quotient de Bruijn graph weighted by the level-N Haar averages.
///
/// Edge id equals the integer value of its word, except that the two
/// constant loops are merged into edge 0 (weight = mean of both).
/// Throws WeightMismatch if the two loop weights differ by more than their
/// combined error bound.
WeightedDigraph<double> build_graph(const CylinderAverages& weights);

/// Unweighted G_N (all weights zero), for structural tests.
WeightedDigraph<double> quotient_debruijn(int order);

/// The repeating block of a closed walk given by its edge labels, in
/// least-rotation form. The merged loop may stand for 0^N or 1^N.
BinaryWord cycle_to_code(std::span<const BinaryWord> edge_labels);

/// Closed walk in G_N traced by the periodic word code^∞: one edge per
/// N-bit window, 1^N mapping to the merged loop.
inline std::vector<int> code_to_walk(const BinaryWord& code, int order) {
  if (code.empty()) throw std::invalid_argument("empty code");
  if (order < 2 || order > 62) throw std::invalid_argument("order out of range");
  const int p = code.length();
  const std::uint64_t ones = (std::uint64_t{1} << order) - 1;
  std::vector<int> walk;
  walk.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    std::uint64_t w = 0;
    for (int k = 0; k < order; ++k) w = (w << 1) | static_cast<std::uint64_t>(code.at((i + k) % p));
    walk.push_back(w == ones ? 0 : static_cast<int>(w));
  }
  return walk;
}

/// A policy on G_N (one out-edge id per vertex, −1 for none) built from one
/// on G_(N−1): each vertex copies the bit its (N−2)-bit suffix chose.
inline std::vector<int> lift_policy(const std::vector<int>& coarse, int order) {
  if (order < 3 || order > 30) throw std::invalid_argument("order out of range");
  // (k−1)-bit words minus the glued all-ones word.
  const std::uint64_t coarse_ones = (std::uint64_t{1} << (order - 2)) - 1;
  if (coarse.size() != coarse_ones) throw std::invalid_argument("coarse policy has the wrong size");
  const std::uint64_t n = (std::uint64_t{1} << (order - 1)) - 1;
  std::vector<int> out(n, -1);
  for (std::uint64_t w = 0; w < n; ++w) {
    const std::uint64_t u = w & coarse_ones;
    const int e = coarse[u == coarse_ones ? 0 : u];
    if (e < 0) continue;
    // The merged loop repeats whichever constant word u is.
    const std::uint64_t bit = e == 0 ? (u == coarse_ones ? 1 : 0) : static_cast<std::uint64_t>(e & 1);
    out[w] = static_cast<int>((w << 1) | bit);
  }
  return out;
}

bool is_strongly_connected(const WeightedDigraph<double>& g);

/// One edge per line: `label source target weight`, weights with 17 digits.
void write_graph_dump(std::ostream& os, const WeightedDigraph<double>& g);

}  // namespace gelfond
