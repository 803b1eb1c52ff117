#pragma once

// Howard policy iteration for the max-plus spectral problem on a weighted
// digraph: maximum cycle mean, one critical cycle, the second maximum cycle
// mean obtained by deleting critical edges, and the resulting gap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gelfond/debruijn.hpp"

namespace gelfond {

class NoCycle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// policy[v] is the out-edge chosen at v, or −1 when v cannot reach a cycle.
using Policy = std::vector<int>;

template <typename Scalar = double>
struct Eigenmode {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector eta;  // cycle mean reached from each vertex
  Vector x;    // bias
  Scalar lambda = -std::numeric_limits<Scalar>::infinity();
};

template <typename Scalar = double>
struct CycleResult {
  Scalar mean = -std::numeric_limits<Scalar>::infinity();
  std::vector<int> edge_ids;  // in walk order, starting at the smallest vertex
  BinaryWord code;            // empty if the graph is unlabeled or the walk is not periodic
  bool periodic = false;
  int period = 0;
  long iterations = 0;
  Policy policy;  // converged policy, reusable as a warm start
};

template <typename Scalar = double>
struct GapResult {
  Scalar lambda1 = 0;
  Scalar lambda2 = 0;
  Scalar gap = 0;
  CycleResult<Scalar> gamma1;
  CycleResult<Scalar> gamma2;
  long iterations = 0;
  /// False when the computation stopped early against a target; λ2 is
  /// then a lower bound and gap an upper bound.
  bool exact = true;
};

struct HowardOptions {
  /// Relative slack in the improvement tests.
  double relative_tolerance = 0x1p-48;
  /// Worker threads for the deletions in mcm2.
  int threads = 1;
};

namespace detail {

template <typename Scalar>
Scalar slack(Scalar a, double rel) {
  return static_cast<Scalar>(rel) * std::max(Scalar(1), std::abs(a));
}

/// Walk from `start` along the policy until a vertex repeats; returns the
/// cycle vertices beginning at the smallest id.
inline std::vector<int> policy_cycle_from(int start, const std::vector<int>& next,
                                          std::vector<int>& stamp, int mark) {
  int u = start;
  while (stamp[static_cast<std::size_t>(u)] != mark) {
    stamp[static_cast<std::size_t>(u)] = mark;
    u = next[static_cast<std::size_t>(u)];
  }
  std::vector<int> cycle{u};
  for (int w = next[static_cast<std::size_t>(u)]; w != u; w = next[static_cast<std::size_t>(w)]) {
    cycle.push_back(w);
  }
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  return cycle;
}

}  // namespace detail

/// Vertices with a path into some cycle using active edges only.
template <typename Scalar>
std::vector<char> live_vertices(const DigraphView<Scalar>& view) {
  const auto& g = *view.graph;
  const auto n = static_cast<std::size_t>(g.vertex_count);
  std::vector<int> outdeg(n, 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (view.active(e)) ++outdeg[static_cast<std::size_t>(g.source[static_cast<std::size_t>(e)])];
  }
  std::vector<char> live(n, 1);
  std::vector<int> stack;
  for (std::size_t v = 0; v < n; ++v) {
    if (outdeg[v] == 0) stack.push_back(static_cast<int>(v));
  }
  if (stack.empty()) return live;

  // Reverse adjacency (CSR) over active edges, only needed when pruning.
  std::vector<int> in_offset(n + 1, 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (view.active(e)) ++in_offset[static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)]) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) in_offset[v + 1] += in_offset[v];
  std::vector<int> preds(static_cast<std::size_t>(in_offset[n]));
  {
    std::vector<int> fill(in_offset.begin(), in_offset.end() - 1);
    for (int e = 0; e < g.edge_count(); ++e) {
      if (!view.active(e)) continue;
      const auto t = static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)]);
      preds[static_cast<std::size_t>(fill[t]++)] = g.source[static_cast<std::size_t>(e)];
    }
  }
  while (!stack.empty()) {
    const auto v = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    if (!live[v]) continue;
    live[v] = 0;
    for (int k = in_offset[v]; k < in_offset[v + 1]; ++k) {
      const int p = preds[static_cast<std::size_t>(k)];
      if (--outdeg[static_cast<std::size_t>(p)] == 0) stack.push_back(p);
    }
  }
  return live;
}

/// Each live vertex takes its heaviest active out-edge into a live vertex,
/// lowest edge id on ties.
template <typename Scalar>
Policy initial_policy(const DigraphView<Scalar>& view, const std::vector<char>& live) {
  const auto& g = *view.graph;
  Policy policy(static_cast<std::size_t>(g.vertex_count), -1);
  for (int v = 0; v < g.vertex_count; ++v) {
    if (!live[static_cast<std::size_t>(v)]) continue;
    int best = -1;
    for (int e : g.out(v)) {
      if (!view.active(e) || !live[static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)])]) continue;
      if (best < 0 || g.weight[e] > g.weight[best]) best = e;
    }
    policy[static_cast<std::size_t>(v)] = best;
  }
  return policy;
}

/// Eigenmode (η, x) of the one-edge-per-vertex policy graph.
///
/// Each policy cycle fixes η on every vertex that reaches it; the cycle is
/// anchored at its smallest vertex (x = 0) and x is propagated backwards
/// along policy edges: x_j = w(π(j)) − η + x_{Out(π(j))}.
template <typename Scalar>
Eigenmode<Scalar> value_determination(const DigraphView<Scalar>& view, const Policy& policy) {
  const auto& g = *view.graph;
  const auto n = static_cast<std::size_t>(g.vertex_count);
  Eigenmode<Scalar> mode;
  mode.eta = Eigenmode<Scalar>::Vector::Constant(static_cast<Eigen::Index>(n),
                                                 -std::numeric_limits<Scalar>::infinity());
  mode.x = Eigenmode<Scalar>::Vector::Zero(static_cast<Eigen::Index>(n));

  std::vector<int> next(n, -1);
  std::vector<int> in_offset(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (policy[v] < 0) continue;
    if (!view.active(policy[v])) throw std::invalid_argument("policy uses a removed edge");
    next[v] = g.target[static_cast<std::size_t>(policy[v])];
    ++in_offset[static_cast<std::size_t>(next[v]) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) in_offset[v + 1] += in_offset[v];
  std::vector<int> in_list(static_cast<std::size_t>(in_offset[n]));
  {
    std::vector<int> fill(in_offset.begin(), in_offset.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
      if (next[v] >= 0) in_list[static_cast<std::size_t>(fill[static_cast<std::size_t>(next[v])]++)] = static_cast<int>(v);
    }
  }

  enum : char { kFresh = 0, kOnPath = 1, kDone = 2 };
  std::vector<char> state(n, kFresh);
  std::vector<int> queue;
  queue.reserve(n);
  for (std::size_t start = 0; start < n; ++start) {
    if (next[start] < 0 || state[start] != kFresh) continue;
    std::size_t u = start;
    while (state[u] == kFresh) {
      state[u] = kOnPath;
      u = static_cast<std::size_t>(next[u]);
    }
    if (state[u] == kDone) {
      throw std::logic_error("value determination reached a solved basin from a fresh vertex");
    }
    // u lies on a new policy cycle.
    std::size_t anchor = u;
    for (auto w = static_cast<std::size_t>(next[u]); w != u; w = static_cast<std::size_t>(next[w])) {
      anchor = std::min(anchor, w);
    }
    Scalar sum = 0;
    int len = 0;
    std::size_t w = anchor;
    do {
      sum += g.weight[policy[w]];
      ++len;
      w = static_cast<std::size_t>(next[w]);
    } while (w != anchor);
    const Scalar mean = sum / static_cast<Scalar>(len);

    const auto a = static_cast<Eigen::Index>(anchor);
    mode.eta[a] = mean;
    mode.x[a] = 0;
    state[anchor] = kDone;
    queue.clear();
    queue.push_back(static_cast<int>(anchor));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto t = static_cast<std::size_t>(queue[head]);
      for (int k = in_offset[t]; k < in_offset[t + 1]; ++k) {
        const auto p = static_cast<std::size_t>(in_list[static_cast<std::size_t>(k)]);
        if (state[p] == kDone) continue;
        const auto pi = static_cast<Eigen::Index>(p);
        mode.eta[pi] = mean;
        mode.x[pi] = g.weight[policy[p]] - mean + mode.x[static_cast<Eigen::Index>(t)];
        state[p] = kDone;
        queue.push_back(static_cast<int>(p));
      }
    }
  }
  mode.lambda = mode.eta.size() ? mode.eta.maxCoeff() : -std::numeric_limits<Scalar>::infinity();
  return mode;
}

/// One improvement step. Returns std::nullopt when I = J = ∅ (converged).
///
/// K(i): out-edges maximising η at the target. J: vertices that can reach a
/// strictly larger η; they switch to the first edge of K(i). Otherwise I:
/// vertices where some edge of K(i) gives w − η + x above x_i; they switch
/// to the first maximiser L(i).
template <typename Scalar>
std::optional<Policy> policy_improvement(const DigraphView<Scalar>& view, const Policy& policy,
                                         const Eigenmode<Scalar>& mode,
                                         const HowardOptions& opts = {}) {
  const auto& g = *view.graph;
  const int n = g.vertex_count;
  const double rel = opts.relative_tolerance;
  Policy eta_switch = policy;
  Policy bias_switch = policy;
  bool any_j = false;
  bool any_i = false;
  for (int i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    if (policy[iu] < 0) continue;
    Scalar best_eta = -std::numeric_limits<Scalar>::infinity();
    int k_first = -1;
    for (int e : g.out(i)) {
      if (!view.active(e)) continue;
      const Scalar eta_j = mode.eta[g.target[static_cast<std::size_t>(e)]];
      if (eta_j > best_eta) {
        best_eta = eta_j;
        k_first = e;
      }
    }
    if (best_eta > mode.eta[i] + detail::slack(mode.eta[i], rel)) {
      eta_switch[iu] = k_first;
      any_j = true;
      continue;
    }
    if (any_j) continue;
    Scalar best_val = -std::numeric_limits<Scalar>::infinity();
    int l_first = -1;
    for (int e : g.out(i)) {
      if (!view.active(e)) continue;
      const int j = g.target[static_cast<std::size_t>(e)];
      if (mode.eta[j] != best_eta) continue;
      const Scalar val = g.weight[e] - mode.eta[j] + mode.x[j];
      if (val > best_val) {
        best_val = val;
        l_first = e;
      }
    }
    if (best_val > mode.x[i] + detail::slack(mode.x[i], rel)) {
      bias_switch[iu] = l_first;
      any_i = true;
    }
  }
  if (any_j) return eta_switch;
  if (any_i) return bias_switch;
  return std::nullopt;
}

/// Maximum cycle mean over all cycles of the view, with one attaining simple
/// cycle taken from the converged policy. `warm` may seed the policy; edges
/// it uses that are no longer active are replaced by the initial choice.
template <typename Scalar>
CycleResult<Scalar> mcm1(const DigraphView<Scalar>& view, const HowardOptions& opts = {},
                         const Policy* warm = nullptr) {
  const auto& g = *view.graph;
  const auto live = live_vertices(view);
  if (std::none_of(live.begin(), live.end(), [](char c) { return c != 0; })) {
    throw NoCycle("graph has no cycle");
  }
  Policy policy = initial_policy(view, live);
  if (warm != nullptr) {
    for (std::size_t v = 0; v < policy.size(); ++v) {
      if (warm->size() != policy.size()) break;
      const int e = (*warm)[v];
      if (policy[v] >= 0 && e >= 0 && e < g.edge_count() && view.active(e) &&
          g.source[static_cast<std::size_t>(e)] == static_cast<int>(v) &&
          live[static_cast<std::size_t>(g.target[static_cast<std::size_t>(e)])]) {
        policy[v] = e;
      }
    }
  }

  const long limit = static_cast<long>(g.edge_count()) * g.vertex_count + 16;
  long iterations = 0;
  Eigenmode<Scalar> mode = value_determination(view, policy);
  while (auto improved = policy_improvement(view, policy, mode, opts)) {
    policy = std::move(*improved);
    mode = value_determination(view, policy);
    if (++iterations > limit) throw std::runtime_error("policy iteration did not converge");
  }

  Eigen::Index best = 0;
  mode.eta.maxCoeff(&best);
  std::vector<int> next(policy.size(), -1);
  for (std::size_t v = 0; v < policy.size(); ++v) {
    if (policy[v] >= 0) next[v] = g.target[static_cast<std::size_t>(policy[v])];
  }
  std::vector<int> stamp(policy.size(), 0);
  const auto cycle = detail::policy_cycle_from(static_cast<int>(best), next, stamp, 1);

  CycleResult<Scalar> out;
  out.mean = mode.eta[best];
  out.period = static_cast<int>(cycle.size());
  out.iterations = iterations;
  for (int v : cycle) out.edge_ids.push_back(policy[static_cast<std::size_t>(v)]);
  if (g.has_labels()) {
    std::vector<BinaryWord> labels;
    labels.reserve(out.edge_ids.size());
    for (int e : out.edge_ids) labels.push_back(g.label[static_cast<std::size_t>(e)]);
    try {
      out.code = cycle_to_code(labels);
      out.periodic = true;
    } catch (const std::exception&) {
      out.periodic = false;
    }
  }
  out.policy = std::move(policy);
  return out;
}

/// Mean weight of a closed walk given by edge ids, or nullopt if the ids do
/// not form a closed walk of active edges.
template <typename Scalar>
std::optional<Scalar> walk_mean(const DigraphView<Scalar>& view, std::span<const int> walk) {
  const auto& g = *view.graph;
  if (walk.empty()) return std::nullopt;
  Scalar sum = 0;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const int e = walk[i];
    const int f = walk[(i + 1) % walk.size()];
    if (e < 0 || e >= g.edge_count() || f < 0 || f >= g.edge_count() || !view.active(e)) {
      return std::nullopt;
    }
    if (g.target[static_cast<std::size_t>(e)] != g.source[static_cast<std::size_t>(f)]) return std::nullopt;
    sum += g.weight[e];
  }
  return sum / static_cast<Scalar>(walk.size());
}

/// Stopping rule for mcm2/gap: once λ1 − λ2 ≤ target is certain the exact
/// λ2 is no longer needed.
template <typename Scalar>
struct GapTarget {
  Scalar target = 0;
  /// Closed walks to try first; any walk not containing every edge of Γ
  /// has mean ≤ λ2.
  std::vector<std::vector<int>> candidates;
};

/// Best cycle mean once any single edge of gamma1 is deleted. The deletions
/// are independent and may run on several threads.
///
/// With a stop rule, sequential runs stop as soon as some deletion reaches
/// λ2 ≥ λ1 − target; `complete` is then false and the mean is a lower bound.
template <typename Scalar>
CycleResult<Scalar> mcm2(const DigraphView<Scalar>& view, const CycleResult<Scalar>& gamma1,
                         const HowardOptions& opts = {}, std::optional<Scalar> stop_at = std::nullopt,
                         bool* complete = nullptr) {
  const auto& edges = gamma1.edge_ids;
  auto solve = [&](int e) -> std::optional<CycleResult<Scalar>> {
    try {
      return mcm1(remove_edge(view, e), opts, &gamma1.policy);
    } catch (const NoCycle&) {
      return std::nullopt;
    }
  };
  if (complete) *complete = true;

  std::vector<std::optional<CycleResult<Scalar>>> results(edges.size());
  if (opts.threads > 1 && edges.size() > 1) {
    std::vector<std::future<void>> jobs;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(opts.threads), edges.size());
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t k = w; k < edges.size(); k += workers) results[k] = solve(edges[k]);
      }));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t k = 0; k < edges.size(); ++k) {
      results[k] = solve(edges[k]);
      if (stop_at && results[k] && results[k]->mean >= *stop_at) {
        if (complete) *complete = k + 1 == edges.size();
        break;
      }
    }
  }

  std::optional<CycleResult<Scalar>> best;
  long iterations = 0;
  for (auto& r : results) {
    if (!r) continue;
    iterations += r->iterations;
    if (!best || r->mean > best->mean) best = std::move(r);
  }
  if (!best) throw NoCycle("every deletion of a critical edge leaves an acyclic graph");
  best->iterations = iterations;
  return *best;
}

/// λ1, λ2 and λ1 − λ2, clamped to 0 when the two agree within tolerance.
///
/// With a target, λ2 is only resolved as far as needed to decide whether
/// the gap exceeds it: if a candidate walk or a deletion run shows
/// gap ≤ target, `exact` is false and `gap` is an upper bound.
template <typename Scalar>
GapResult<Scalar> gap(const DigraphView<Scalar>& view, const HowardOptions& opts = {},
                      const GapTarget<Scalar>* target = nullptr, const Policy* warm = nullptr) {
  GapResult<Scalar> out;
  out.gamma1 = mcm1(view, opts, warm);
  out.lambda1 = out.gamma1.mean;
  out.iterations = out.gamma1.iterations;
  auto finish = [&] {
    out.gap = out.lambda1 - out.lambda2;
    if (out.gap <= detail::slack(out.lambda1, opts.relative_tolerance)) out.gap = 0;
    return out;
  };

  std::optional<Scalar> stop_at;
  if (target) {
    stop_at = out.lambda1 - target->target;
    std::vector<int> critical = out.gamma1.edge_ids;
    std::sort(critical.begin(), critical.end());
    for (const auto& walk : target->candidates) {
      std::vector<int> sorted = walk;
      std::sort(sorted.begin(), sorted.end());
      if (std::includes(sorted.begin(), sorted.end(), critical.begin(), critical.end())) continue;
      const auto mean = walk_mean(view, std::span<const int>(walk));
      if (mean && *mean >= *stop_at) {
        out.lambda2 = *mean;
        out.exact = false;
        return finish();
      }
    }
  }

  bool complete = true;
  out.gamma2 = mcm2(view, out.gamma1, opts, stop_at, &complete);
  out.lambda2 = out.gamma2.mean;
  out.exact = complete;
  out.iterations += out.gamma2.iterations;
  return finish();
}

}  // namespace gelfond
