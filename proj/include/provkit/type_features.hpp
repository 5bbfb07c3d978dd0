#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "provkit/parallel.hpp"
#include "provkit/prov_graph.hpp"

namespace provkit {

/// (source kind, action, destination kind) of one edge.
struct TypeTuple {
  EntityKind src = EntityKind::process;
  ActionKind action = ActionKind::read;
  EntityKind dst = EntityKind::file;

  static constexpr std::size_t kCodeCount = kEntityKindCount * kActionKindCount * kEntityKindCount;

  constexpr std::uint16_t code() const {
    return static_cast<std::uint16_t>(
        (static_cast<std::size_t>(src) * kActionKindCount + static_cast<std::size_t>(action)) * kEntityKindCount +
        static_cast<std::size_t>(dst));
  }

  static constexpr TypeTuple from_code(std::uint16_t c) {
    return {static_cast<EntityKind>(c / (kActionKindCount * kEntityKindCount)),
            static_cast<ActionKind>((c / kEntityKindCount) % kActionKindCount),
            static_cast<EntityKind>(c % kEntityKindCount)};
  }

  std::string name() const {
    return std::string(to_string(src)) + ":" + std::string(to_string(action)) + ":" + std::string(to_string(dst));
  }

  friend bool operator==(const TypeTuple&, const TypeTuple&) = default;
};

inline TypeTuple edge_type(const ProvGraph& g, const Edge& e) {
  return {g.nodes()[e.src].kind, e.action, g.nodes()[e.dst].kind};
}

/// Stable indexing of the type tuples seen in a set of graphs. Indices are
/// assigned in ascending tuple-code order per `add`, so growing a universe
/// never renumbers existing tuples.
class TupleUniverse {
 public:
  TupleUniverse() { index_.fill(kAbsent); }

  static TupleUniverse from_graphs(std::initializer_list<const ProvGraph*> graphs) {
    TupleUniverse u;
    for (const auto* g : graphs) u.add(*g);
    return u;
  }

  /// Adds the tuples of `g` not yet present; returns how many were new.
  std::size_t add(const ProvGraph& g) {
    std::array<bool, TypeTuple::kCodeCount> seen{};
    for (const auto& e : g.edges()) seen[edge_type(g, e).code()] = true;
    std::size_t added = 0;
    for (std::uint16_t c = 0; c < TypeTuple::kCodeCount; ++c) {
      if (seen[c] && index_[c] == kAbsent) {
        index_[c] = static_cast<std::uint32_t>(tuples_.size());
        tuples_.push_back(TypeTuple::from_code(c));
        ++added;
      }
    }
    return added;
  }

  std::size_t size() const noexcept { return tuples_.size(); }
  const std::vector<TypeTuple>& tuples() const noexcept { return tuples_; }
  bool contains(const TypeTuple& t) const { return index_[t.code()] != kAbsent; }

  std::size_t index_of(const TypeTuple& t) const {
    const auto i = index_[t.code()];
    if (i == kAbsent) throw Error("type tuple " + t.name() + " is not in the universe");
    return i;
  }

 private:
  static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();
  std::array<std::uint32_t, TypeTuple::kCodeCount> index_{};
  std::vector<TypeTuple> tuples_;
};

/// Count vector over a universe. Owner is a node uuid (0 when synthetic).
struct TypeVector {
  std::uint64_t owner = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

inline constexpr std::size_t kDefaultHops = 2;
inline constexpr std::size_t kDefaultNeighborCap = 100;
inline constexpr std::size_t kUnlimitedCap = std::numeric_limits<std::size_t>::max();

/// Reusable per-thread state for neighborhood traversal.
class NeighborhoodWalker {
 public:
  explicit NeighborhoodWalker(const ProvGraph& g)
      : g_(g), node_stamp_(g.node_count(), 0), depth_(g.node_count(), 0), edge_stamp_(g.edge_count(), 0) {}

  /// Depth-first walk from node index `v`, treating edges as undirected for
  /// reachability. Each node closer than `k` hops expands at most `cap`
  /// incident edges in (timestamp, seq) order; every traversed edge is
  /// reported once via visit(edge_id).
  template <typename Visit>
  void walk(std::uint32_t v, std::size_t k, std::size_t cap, Visit&& visit) {
    if (k == 0 || cap == 0) throw Error("hop bound and neighbor cap must be >= 1");
    if (++gen_ == 0) {
      std::fill(node_stamp_.begin(), node_stamp_.end(), 0);
      std::fill(edge_stamp_.begin(), edge_stamp_.end(), 0);
      gen_ = 1;
    }
    stack_.clear();
    node_stamp_[v] = gen_;
    depth_[v] = 0;
    stack_.push_back({v, 0});
    while (!stack_.empty()) {
      const auto [u, d] = stack_.back();
      stack_.pop_back();
      if (d != depth_[u] || d >= k) continue;  // stale entry or frontier node
      const auto adj = g_.incident(u);
      const std::size_t limit = std::min(cap, adj.size());
      for (std::size_t i = limit; i-- > 0;) {
        const std::uint32_t eid = adj[i];
        if (edge_stamp_[eid] != gen_) {
          edge_stamp_[eid] = gen_;
          visit(eid);
        }
        const auto& e = g_.edges()[eid];
        const std::uint32_t w = e.src == u ? e.dst : e.src;
        const auto nd = static_cast<std::uint32_t>(d + 1);
        if (node_stamp_[w] != gen_ || nd < depth_[w]) {
          node_stamp_[w] = gen_;
          depth_[w] = nd;
          stack_.push_back({w, nd});
        }
      }
    }
  }

 private:
  struct Frame {
    std::uint32_t node;
    std::uint32_t depth;
  };

  const ProvGraph& g_;
  std::vector<std::uint32_t> node_stamp_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> edge_stamp_;
  std::vector<Frame> stack_;
  std::uint32_t gen_ = 0;
};

/// Multiset of type tuples on the edges traversed from `v` within `k` hops.
inline std::vector<TypeTuple> info(const ProvGraph& g, std::uint64_t v, std::size_t k = kDefaultHops,
                                   std::size_t cap = kDefaultNeighborCap) {
  const auto idx = g.index_of(v);
  if (!idx) throw Error("node " + hex64(v) + " not in graph");
  std::vector<TypeTuple> out;
  NeighborhoodWalker walker(g);
  walker.walk(*idx, k, cap, [&](std::uint32_t eid) { out.push_back(edge_type(g, g.edges()[eid])); });
  return out;
}

inline TypeVector vectorize(std::span<const TypeTuple> multiset, const TupleUniverse& universe,
                            std::uint64_t owner = 0) {
  TypeVector v{owner, std::vector<std::uint32_t>(universe.size(), 0)};
  for (const auto& t : multiset) ++v.counts[universe.index_of(t)];
  return v;
}

inline double distance(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size())
    throw Error("type vector length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto diff = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(b[i]);
    sum += static_cast<std::uint64_t>(diff * diff);
  }
  return std::sqrt(static_cast<double>(sum));
}

/// Euclidean distance between two count vectors.
inline double distance(const TypeVector& a, const TypeVector& b) { return distance(a.counts, b.counts); }

/// Minimum distance from `test` to any vector in `train` (exhaustive).
inline double nearest_train_distance(const TypeVector& test, std::span<const TypeVector> train) {
  if (train.empty()) throw Error("nearest_train_distance: empty training set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : train) best = std::min(best, distance(test, t));
  return best;
}

/// Exact nearest-neighbour search over a fixed set of count vectors.
/// Duplicates are collapsed; candidates are scanned outward from the query's
/// norm and pruned with the reverse triangle inequality.
class NearestIndex {
 public:
  NearestIndex() = default;

  NearestIndex(std::vector<std::vector<std::uint32_t>> vecs, std::size_t dim) : dim_(dim) {
    for (auto& v : vecs) v.resize(dim, 0);
    std::sort(vecs.begin(), vecs.end());
    vecs.erase(std::unique(vecs.begin(), vecs.end()), vecs.end());
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) order.emplace_back(norm(vecs[i]), i);
    std::sort(order.begin(), order.end());
    flat_.reserve(vecs.size() * dim);
    for (const auto& [n, i] : order) {
      norms_.push_back(n);
      flat_.insert(flat_.end(), vecs[i].begin(), vecs[i].end());
    }
  }

  std::size_t size() const noexcept { return norms_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const std::uint32_t> vector(std::size_t i) const { return {flat_.data() + i * dim_, dim_}; }

  /// Distance to the closest stored vector. `q` may be longer than dim();
  /// stored vectors are zero in the extra coordinates. With `skip_exact`, a
  /// stored copy of `q` itself is ignored (leave-one-out queries).
  double nearest(std::span<const std::uint32_t> q, bool skip_exact = false) const {
    if (norms_.empty()) throw Error("nearest-neighbour index is empty");
    std::uint64_t tail = 0;
    for (std::size_t i = dim_; i < q.size(); ++i) tail += static_cast<std::uint64_t>(q[i]) * q[i];
    const auto head = q.first(std::min(q.size(), dim_));
    const double qn = std::sqrt(static_cast<double>(sq_norm(head)));

    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    const auto consider = [&](std::size_t i) {
      const auto v = vector(i);
      std::uint64_t sum = tail;
      for (std::size_t j = 0; j < dim_ && sum < best; ++j) {
        const std::int64_t qj = j < head.size() ? head[j] : 0;
        const auto diff = qj - static_cast<std::int64_t>(v[j]);
        sum += static_cast<std::uint64_t>(diff * diff);
      }
      if (sum == 0 && skip_exact) return;
      best = std::min(best, sum);
    };
    const auto bound = [&](std::size_t i) {
      const double gap = norms_[i] - qn;
      return gap * gap + static_cast<double>(tail);
    };

    auto hi = static_cast<std::size_t>(std::lower_bound(norms_.begin(), norms_.end(), qn) - norms_.begin());
    std::size_t lo = hi;
    bool up = hi < norms_.size();
    bool down = lo > 0;
    while (up || down) {
      if (up) {
        if (bound(hi) * (1.0 - 1e-12) > static_cast<double>(best)) up = false;
        else {
          consider(hi);
          up = ++hi < norms_.size();
        }
      }
      if (down) {
        if (bound(lo - 1) * (1.0 - 1e-12) > static_cast<double>(best)) down = false;
        else {
          consider(lo - 1);
          down = --lo > 0;
        }
      }
      if (best == 0) break;
    }
    if (best == std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(best));
  }

 private:
  static std::uint64_t sq_norm(std::span<const std::uint32_t> v) {
    std::uint64_t s = 0;
    for (auto c : v) s += static_cast<std::uint64_t>(c) * c;
    return s;
  }
  static double norm(std::span<const std::uint32_t> v) { return std::sqrt(static_cast<double>(sq_norm(v))); }

  std::size_t dim_ = 0;
  std::vector<double> norms_;
  std::vector<std::uint32_t> flat_;
};

/// Type vectors of the given node indices of `g`, in the order given.
inline std::vector<TypeVector> node_vectors(const ProvGraph& g, const TupleUniverse& universe,
                                            std::span<const std::uint32_t> nodes, std::size_t k = kDefaultHops,
                                            std::size_t cap = kDefaultNeighborCap, unsigned jobs = 1) {
  std::vector<std::uint32_t> code_to_index(TypeTuple::kCodeCount, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t i = 0; i < universe.size(); ++i) code_to_index[universe.tuples()[i].code()] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> edge_index(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto idx = code_to_index[edge_type(g, g.edges()[e]).code()];
    if (idx == std::numeric_limits<std::uint32_t>::max())
      throw Error("type tuple " + edge_type(g, g.edges()[e]).name() + " is not in the universe");
    edge_index[e] = idx;
  }

  std::vector<TypeVector> out(nodes.size());
  parallel_for(nodes.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    NeighborhoodWalker walker(g);
    for (std::size_t i = begin; i < end; ++i) {
      const auto v = nodes[i];
      if (v >= g.node_count()) throw Error("node index out of range");
      auto& vec = out[i];
      vec.owner = g.nodes()[v].uuid;
      vec.counts.assign(universe.size(), 0);
      walker.walk(v, k, cap, [&](std::uint32_t eid) { ++vec.counts[edge_index[eid]]; });
    }
  });
  return out;
}

inline std::vector<std::uint32_t> all_nodes(const ProvGraph& g) {
  std::vector<std::uint32_t> v(g.node_count());
  for (std::uint32_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

/// Type vectors of every node in `g`, in node order.
inline std::vector<TypeVector> node_vectors(const ProvGraph& g, const TupleUniverse& universe,
                                            std::size_t k = kDefaultHops, std::size_t cap = kDefaultNeighborCap,
                                            unsigned jobs = 1) {
  return node_vectors(g, universe, all_nodes(g), k, cap, jobs);
}

/// Feature dump: uuid,label,<one column per tuple>, one row per vector.
inline void write_features_csv(std::ostream& out, const ProvGraph& g, const TupleUniverse& universe,
                               std::span<const TypeVector> vectors) {
  out << "uuid,label";
  for (const auto& t : universe.tuples()) out << ',' << t.name();
  out << '\n';
  for (const auto& v : vectors) {
    const auto idx = g.index_of(v.owner);
    if (!idx) throw Error("node " + hex64(v.owner) + " not in graph");
    out << hex64(v.owner) << ',' << to_string(g.nodes()[*idx].label);
    for (auto c : v.counts) out << ',' << c;
    out << '\n';
  }
}

enum class Aggregate : std::uint8_t { mean, median };

struct DistanceRatio {
  double ratio = 1.0;
  double mean_malicious = 0.0;  // aggregate over malicious test nodes
  double mean_benign = 0.0;     // aggregate over benign test nodes
  std::size_t malicious_nodes = 0;
  std::size_t benign_nodes = 0;
  bool degenerate = false;  // a zero denominator was guarded
};

inline constexpr double kRatioEpsilon = 1e-9;

namespace detail {

inline double aggregate(std::vector<double> xs, Aggregate how) {
  if (how == Aggregate::mean) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  }
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

/// Ratio of aggregated malicious to benign nearest-train distances. 0/0
/// yields 1.0; x/0 divides by kRatioEpsilon. Both cases set `degenerate`.
inline DistanceRatio distance_ratio(std::vector<double> malicious, std::vector<double> benign,
                                    Aggregate how = Aggregate::mean) {
  DistanceRatio r;
  r.malicious_nodes = malicious.size();
  r.benign_nodes = benign.size();
  if (malicious.empty()) throw Error("distance_ratio: test graph has no malicious nodes");
  if (benign.empty()) throw Error("distance_ratio: test graph has no benign nodes");
  r.mean_malicious = detail::aggregate(std::move(malicious), how);
  r.mean_benign = detail::aggregate(std::move(benign), how);
  if (r.mean_benign == 0.0) {
    r.degenerate = true;
    r.ratio = r.mean_malicious == 0.0 ? 1.0 : r.mean_malicious / kRatioEpsilon;
  } else {
    r.ratio = r.mean_malicious / r.mean_benign;
  }
  return r;
}

/// Distance ratio of every node of `test` against every node of `train`.
inline DistanceRatio distance_ratio(const ProvGraph& train, const ProvGraph& test, std::size_t k = kDefaultHops,
                                    std::size_t cap = kDefaultNeighborCap, Aggregate how = Aggregate::mean,
                                    unsigned jobs = 1) {
  std::size_t mal_nodes = 0;
  for (const auto& n : test.nodes()) mal_nodes += n.label == Label::malicious;
  if (mal_nodes == 0) throw Error("distance_ratio: test graph has no malicious nodes");
  if (mal_nodes == test.node_count()) throw Error("distance_ratio: test graph has no benign nodes");
  if (train.node_count() == 0) throw Error("distance_ratio: empty training graph");

  const auto universe = TupleUniverse::from_graphs({&train, &test});
  std::vector<std::vector<std::uint32_t>> train_counts;
  for (auto& v : node_vectors(train, universe, k, cap, jobs)) train_counts.push_back(std::move(v.counts));
  const NearestIndex index(std::move(train_counts), universe.size());
  const auto test_vecs = node_vectors(test, universe, k, cap, jobs);

  std::vector<double> nearest(test_vecs.size());
  parallel_for(test_vecs.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) nearest[i] = index.nearest(test_vecs[i].counts);
  });
  std::vector<double> mal, ben;
  for (std::size_t i = 0; i < test_vecs.size(); ++i)
    (test.nodes()[i].label == Label::malicious ? mal : ben).push_back(nearest[i]);
  return distance_ratio(std::move(mal), std::move(ben), how);
}

}  // namespace provkit
