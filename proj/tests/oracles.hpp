#pragma once

// Slow reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "provkit/provkit.hpp"

namespace oracle {

using provkit::ScoredLabel;

// P(pos > neg) + P(pos == neg)/2 over every pair.
inline double pairwise_auc(const std::vector<ScoredLabel>& xs) {
  double wins = 0, pairs = 0;
  for (const auto& p : xs) {
    if (!p.positive) continue;
    for (const auto& n : xs) {
      if (n.positive) continue;
      pairs += 1;
      if (p.score > n.score) wins += 1;
      else if (p.score == n.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Scores drawn from a small grid so ties are common.
inline std::vector<ScoredLabel> random_scores(std::mt19937_64& rng, std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> size(2, max_n);
  std::uniform_int_distribution<int> grid(0, 40);
  std::bernoulli_distribution pos(0.3);
  std::vector<ScoredLabel> xs(size(rng));
  for (auto& x : xs) {
    x.score = grid(rng) / 4.0;
    x.positive = pos(rng);
  }
  xs[0].positive = true;
  xs[1].positive = false;
  return xs;
}

// Dense modularity straight from the textbook sum over node pairs.
inline double dense_modularity(const provkit::WeightedGraph& g, const std::vector<std::uint32_t>& c) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> k(n, 0.0);
  double two_m = 0;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      a[i][j] = i == j ? 2.0 * g.self_loop(i) : g.weight(i, j);
      k[i] += a[i][j];
      two_m += a[i][j];
    }
  if (two_m == 0) return 0;
  double q = 0;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (c[i] == c[j]) q += a[i][j] - k[i] * k[j] / two_m;
  return q / two_m;
}

// Maximum modularity over every set partition (restricted growth strings).
inline double best_modularity(const provkit::WeightedGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> c(n, 0);
  double best = -1.0;
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t used) {
    if (i == n) {
      best = std::max(best, dense_modularity(g, c));
      return;
    }
    for (std::uint32_t x = 0; x <= used; ++x) {
      c[i] = x;
      rec(i + 1, std::max(used, x + 1));
    }
  };
  c[0] = 0;
  rec(1, 1);
  return best;
}

// Connected graph: random spanning tree plus extra edges, weights in (0, 5].
inline provkit::WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t n) {
  provkit::WeightedGraph g(n);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  for (std::uint32_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::uint32_t> parent(0, v - 1);
    g.add_edge(parent(rng), v, w(rng));
  }
  std::bernoulli_distribution extra(0.3);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (!g.has_edge(u, v) && extra(rng)) g.add_edge(u, v, w(rng));
  return g;
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline double euclid(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// A random tree of processes and files rooted at a process. Returns the
// events; node i is "/n/<i>".
struct Tree {
  std::vector<provkit::Event> events;
  std::vector<int> parent;  // -1 for the root
  std::vector<provkit::EntityKind> kind;
};

inline provkit::EntityAttrs tree_node(std::size_t i, provkit::EntityKind k) {
  const std::string path = "/n/" + std::to_string(i);
  return k == provkit::EntityKind::process ? provkit::process_attrs(1, path) : provkit::file_attrs(path);
}

inline Tree random_tree(std::mt19937_64& rng, std::size_t n) {
  using provkit::ActionKind;
  using provkit::EntityKind;
  Tree t;
  t.parent.assign(n, -1);
  t.kind.assign(n, EntityKind::process);
  std::vector<std::size_t> procs{0};
  std::bernoulli_distribution is_file(0.5);
  const ActionKind file_actions[] = {ActionKind::read, ActionKind::write, ActionKind::exec, ActionKind::load};
  std::uniform_int_distribution<int> pick_action(0, 3);
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, procs.size() - 1);
    const std::size_t p = procs[pick(rng)];
    t.parent[i] = static_cast<int>(p);
    t.kind[i] = is_file(rng) ? EntityKind::file : EntityKind::process;
    if (t.kind[i] == EntityKind::process) procs.push_back(i);
    provkit::Event ev;
    ev.seq = i - 1;
    ev.timestamp = static_cast<std::int64_t>(i);
    ev.subject = tree_node(p, EntityKind::process);
    ev.object = tree_node(i, t.kind[i]);
    ev.action = t.kind[i] == EntityKind::process ? ActionKind::fork : file_actions[pick_action(rng)];
    t.events.push_back(ev);
  }
  return t;
}

// Type-tuple codes of tree edges whose nearer endpoint is < k hops from v.
inline std::multiset<std::uint16_t> tree_neighborhood(const Tree& t, std::size_t v, std::size_t k) {
  const std::size_t n = t.parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 1; i < n; ++i) {
    adj[i].push_back(static_cast<std::size_t>(t.parent[i]));
    adj[static_cast<std::size_t>(t.parent[i])].push_back(i);
  }
  std::vector<std::size_t> dist(n, n + 1);
  std::vector<std::size_t> queue{v};
  dist[v] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (auto w : adj[queue[q]])
      if (dist[w] > n) {
        dist[w] = dist[queue[q]] + 1;
        queue.push_back(w);
      }
  std::multiset<std::uint16_t> out;
  for (std::size_t i = 1; i < n; ++i) {
    const auto p = static_cast<std::size_t>(t.parent[i]);
    if (std::min(dist[i], dist[p]) < k) out.insert(provkit::TypeTuple{t.kind[p], t.events[i - 1].action, t.kind[i]}.code());
  }
  return out;
}

}  // namespace oracle
