#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "provkit/error.hpp"

namespace provkit {

/// Undirected weighted graph with optional self-loops. Parallel edges are
/// merged by summing weights.
class WeightedGraph {
 public:
  explicit WeightedGraph(std::size_t n = 0) : adj_(n), self_(n, 0.0) {}

  std::size_t size() const noexcept { return adj_.size(); }

  void add_edge(std::uint32_t u, std::uint32_t v, double w) {
    if (u >= size() || v >= size()) throw Error("edge endpoint out of range");
    if (w < 0) throw Error("negative edge weight");
    if (u == v) {
      self_[u] += w;
      return;
    }
    bump(u, v, w);
    bump(v, u, w);
  }

  const std::vector<std::pair<std::uint32_t, double>>& neighbors(std::uint32_t u) const { return adj_[u]; }
  double self_loop(std::uint32_t u) const { return self_[u]; }

  /// Weighted degree; a self-loop counts twice.
  double degree(std::uint32_t u) const {
    double k = 2.0 * self_[u];
    for (const auto& [_, w] : adj_[u]) k += w;
    return k;
  }

  double total_weight() const {
    double m = 0.0;
    for (std::uint32_t u = 0; u < size(); ++u) m += degree(u);
    return m / 2.0;
  }

  bool has_edge(std::uint32_t u, std::uint32_t v) const {
    return std::any_of(adj_[u].begin(), adj_[u].end(), [v](const auto& p) { return p.first == v; });
  }

  double weight(std::uint32_t u, std::uint32_t v) const {
    if (u == v) return self_[u];
    for (const auto& [x, w] : adj_[u])
      if (x == v) return w;
    return 0.0;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (std::uint32_t u = 0; u < size(); ++u) {
      n += self_[u] > 0 ? 1 : 0;
      for (const auto& [v, _] : adj_[u]) n += v > u ? 1 : 0;
    }
    return n;
  }

 private:
  void bump(std::uint32_t u, std::uint32_t v, double w) {
    for (auto& [x, ww] : adj_[u]) {
      if (x == v) {
        ww += w;
        return;
      }
    }
    adj_[u].emplace_back(v, w);
  }

  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
  std::vector<double> self_;
};

/// Newman-Girvan modularity of a membership vector.
inline double modularity(const WeightedGraph& g, const std::vector<std::uint32_t>& membership,
                         double resolution = 1.0) {
  const double m2 = 2.0 * g.total_weight();
  if (m2 == 0.0) return 0.0;
  std::unordered_map<std::uint32_t, double> in, tot;
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    const auto c = membership[u];
    tot[c] += g.degree(u);
    in[c] += 2.0 * g.self_loop(u);
    for (const auto& [v, w] : g.neighbors(u))
      if (membership[v] == c) in[c] += w;
  }
  double q = 0.0;
  for (const auto& [c, t] : tot) q += in[c] / m2 - resolution * (t / m2) * (t / m2);
  return q;
}

namespace detail {

// Moves single nodes between communities until no move improves modularity.
// Returns true if any node changed community.
inline bool louvain_local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm, double resolution) {
  const std::size_t n = g.size();
  const double m2 = 2.0 * g.total_weight();
  std::vector<double> k(n), tot(n, 0.0);
  for (std::uint32_t u = 0; u < n; ++u) {
    k[u] = g.degree(u);
    tot[comm[u]] += k[u];
  }
  std::vector<double> links(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::uint32_t u = 0; u < n; ++u) {
      const std::uint32_t old = comm[u];
      tot[old] -= k[u];
      touched.clear();
      touched.push_back(old);
      for (const auto& [v, w] : g.neighbors(u)) {
        const auto c = comm[v];
        if (links[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) touched.push_back(c);
        links[c] += w;
      }
      std::uint32_t best = old;
      double best_gain = links[old] - resolution * tot[old] * k[u] / m2;
      for (const auto c : touched) {
        if (c == old) continue;
        const double gain = links[c] - resolution * tot[c] * k[u] / m2;
        if (gain > best_gain + 1e-12) {
          best = c;
          best_gain = gain;
        }
      }
      for (const auto c : touched) links[c] = 0.0;
      comm[u] = best;
      tot[best] += k[u];
      if (best != old) moved = any = true;
    }
  }
  return any;
}

// Relabels communities 0..c-1 in order of first appearance.
inline std::uint32_t compact(std::vector<std::uint32_t>& comm) {
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  for (auto& c : comm) {
    auto [it, _] = remap.try_emplace(c, static_cast<std::uint32_t>(remap.size()));
    c = it->second;
  }
  return static_cast<std::uint32_t>(remap.size());
}

inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t count) {
  WeightedGraph out(count);
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    if (g.self_loop(u) > 0) out.add_edge(comm[u], comm[u], g.self_loop(u));
    for (const auto& [v, w] : g.neighbors(u))
      if (v > u) out.add_edge(comm[u], comm[v], w);
  }
  return out;
}

}  // namespace detail

/// Multi-level Louvain community detection. Nodes are visited in index order,
/// so the result is deterministic. Returns a community id per node, numbered
/// in order of first appearance.
inline std::vector<std::uint32_t> louvain(const WeightedGraph& g, double resolution = 1.0) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> membership(n);
  for (std::uint32_t u = 0; u < n; ++u) membership[u] = u;
  if (n == 0 || g.total_weight() == 0.0) return membership;

  WeightedGraph level = g;
  while (true) {
    std::vector<std::uint32_t> comm(level.size());
    for (std::uint32_t u = 0; u < level.size(); ++u) comm[u] = u;
    if (!detail::louvain_local_moves(level, comm, resolution)) break;
    const auto count = detail::compact(comm);
    for (auto& c : membership) c = comm[c];
    if (count == level.size()) break;
    level = detail::aggregate(level, comm, count);
  }
  detail::compact(membership);
  return membership;
}

}  // namespace provkit
