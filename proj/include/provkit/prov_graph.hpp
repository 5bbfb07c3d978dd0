#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "provkit/csv.hpp"
#include "provkit/event.hpp"
#include "provkit/uuid.hpp"

namespace provkit {

struct Node {
  std::uint64_t uuid = 0;
  EntityKind kind = EntityKind::process;
  EntityAttrs attrs;  // attributes at first sighting
  Symbol entity;
  Label label = Label::benign;
};

/// One edge per event; endpoints are node indices.
struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  ActionKind action = ActionKind::read;
  std::int64_t timestamp = 0;
  std::uint64_t seq = 0;
  Label label = Label::benign;
};

/// Two distinct identity tuples that hashed to the same uuid.
struct UuidCollision {
  std::uint64_t uuid = 0;
  std::string first;
  std::string second;
};

class BuildError : public Error {
 public:
  BuildError(std::uint64_t seq, const std::string& what)
      : Error("event seq " + std::to_string(seq) + ": " + what), seq_(seq) {}
  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

/// Immutable provenance graph. Multi-edges are kept; each node's incident
/// edges are ordered by (timestamp, seq).
class ProvGraph {
 public:
  ProvGraph() = default;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const UuidStrategy& strategy() const noexcept { return strategy_; }
  const std::vector<UuidCollision>& collisions() const noexcept { return collisions_; }

  std::optional<std::uint32_t> index_of(std::uint64_t uuid) const {
    if (auto it = index_.find(uuid); it != index_.end()) return it->second;
    return std::nullopt;
  }

  const Node& node(std::uint64_t uuid) const {
    auto idx = index_of(uuid);
    if (!idx) throw Error("node " + hex64(uuid) + " not in graph");
    return nodes_[*idx];
  }

  /// Edge ids touching node `v` (a self-loop appears once).
  std::span<const std::uint32_t> incident(std::uint32_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  /// Node uuid -> entity key.
  Symbol entity_of(std::uint64_t uuid) const { return node(uuid).entity; }

  std::size_t entity_count() const {
    std::unordered_set<Symbol> seen;
    for (const auto& n : nodes_) seen.insert(n.entity);
    return seen.size();
  }

  friend ProvGraph build(std::span<const Event> events, const UuidStrategy& strategy);

 private:
  void index_adjacency();

  UuidStrategy strategy_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> adjacency_;
  std::vector<UuidCollision> collisions_;
};

inline void ProvGraph::index_adjacency() {
  offsets_.assign(nodes_.size() + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.src + 1];
    if (e.dst != e.src) ++offsets_[e.dst + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  adjacency_.assign(offsets_.back(), 0);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    adjacency_[fill[e.src]++] = id;
    if (e.dst != e.src) adjacency_[fill[e.dst]++] = id;
  }
  const auto before = [this](std::uint32_t a, std::uint32_t b) {
    const auto& x = edges_[a];
    const auto& y = edges_[b];
    return x.timestamp != y.timestamp ? x.timestamp < y.timestamp : x.seq < y.seq;
  };
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    auto first = adjacency_.begin() + offsets_[v];
    auto last = adjacency_.begin() + offsets_[v + 1];
    if (!std::is_sorted(first, last, before)) std::sort(first, last, before);
  }
}

/// Builds the provenance graph: one node per distinct uuid, one edge per event.
/// A node is malicious iff some incident event is labeled malicious.
inline ProvGraph build(std::span<const Event> events, const UuidStrategy& strategy) {
  ProvGraph g;
  g.strategy_ = strategy;
  g.edges_.reserve(events.size());
  std::vector<std::string> identities;

  const auto intern_node = [&](const EntityAttrs& attrs, std::uint64_t seq) -> std::uint32_t {
    std::string id;
    Symbol entity;
    try {
      id = identity_string(attrs, strategy);
      entity = entity_key(attrs);
    } catch (const UuidError& e) {
      throw BuildError(seq, e.what());
    }
    const std::uint64_t uuid = fnv1a64(id);
    auto [it, inserted] = g.index_.try_emplace(uuid, static_cast<std::uint32_t>(g.nodes_.size()));
    if (inserted) {
      g.nodes_.push_back(Node{uuid, attrs.kind, attrs, entity, Label::benign});
      identities.push_back(std::move(id));
    } else if (identities[it->second] != id) {
      const auto& first = identities[it->second];
      const bool known = std::any_of(g.collisions_.begin(), g.collisions_.end(), [&](const UuidCollision& c) {
        return c.uuid == uuid && c.second == id;
      });
      if (!known) g.collisions_.push_back({uuid, first, id});
    }
    return it->second;
  };

  for (const auto& ev : events) {
    Edge e;
    e.src = intern_node(ev.subject, ev.seq);
    e.dst = intern_node(ev.object, ev.seq);
    e.action = ev.action;
    e.timestamp = ev.timestamp;
    e.seq = ev.seq;
    e.label = ev.label;
    if (e.label == Label::malicious) {
      g.nodes_[e.src].label = Label::malicious;
      g.nodes_[e.dst].label = Label::malicious;
    }
    g.edges_.push_back(e);
  }
  g.index_adjacency();
  return g;
}

inline ProvGraph build(const std::vector<Event>& events, const UuidStrategy& strategy) {
  return build(std::span<const Event>(events), strategy);
}

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t entity_count = 0;
  std::array<std::size_t, kEntityKindCount> nodes_per_kind{};
  std::array<std::size_t, kEntityKindCount> entities_per_kind{};
  std::size_t malicious_nodes = 0;
  std::size_t malicious_edges = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

inline GraphStats graph_stats(const ProvGraph& g) {
  GraphStats s;
  s.node_count = g.node_count();
  s.edge_count = g.edge_count();
  std::unordered_set<Symbol> entities;
  for (const auto& n : g.nodes()) {
    ++s.nodes_per_kind[static_cast<std::size_t>(n.kind)];
    if (entities.insert(n.entity).second) ++s.entities_per_kind[static_cast<std::size_t>(n.kind)];
    if (n.label == Label::malicious) ++s.malicious_nodes;
  }
  s.entity_count = entities.size();
  for (const auto& e : g.edges())
    if (e.label == Label::malicious) ++s.malicious_edges;
  return s;
}

/// Writes nodes.csv (uuid,kind,entity,label) and edges.csv
/// (src,dst,action,ts,label) into `dir`.
inline void export_csv(const ProvGraph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream nodes(dir / "nodes.csv", std::ios::binary);
  std::ofstream edges(dir / "edges.csv", std::ios::binary);
  if (!nodes || !edges) throw Error("cannot write graph CSV into '" + dir.string() + "'");
  nodes << "uuid,kind,entity,label\n";
  for (const auto& n : g.nodes())
    nodes << hex64(n.uuid) << ',' << to_string(n.kind) << ',' << csv::field(n.entity.str()) << ','
          << to_string(n.label) << '\n';
  edges << "src,dst,action,ts,label\n";
  for (const auto& e : g.edges())
    edges << hex64(g.nodes()[e.src].uuid) << ',' << hex64(g.nodes()[e.dst].uuid) << ',' << to_string(e.action)
          << ',' << e.timestamp << ',' << to_string(e.label) << '\n';
}

}  // namespace provkit
