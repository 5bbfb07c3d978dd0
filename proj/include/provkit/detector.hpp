#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "provkit/type_features.hpp"

namespace provkit {

inline constexpr double kDefaultThresholdPercentile = 95.0;

/// Train-side state of the nearest-benign-neighbour detector.
struct DetectorModel {
  std::size_t k = kDefaultHops;
  std::size_t cap = kDefaultNeighborCap;
  TupleUniverse universe;
  NearestIndex train_vectors;        // deduplicated
  std::vector<double> loo_scores;    // per training node, node order
  double default_threshold = 0.0;    // percentile of loo_scores
  std::size_t train_node_count = 0;
};

struct NodeScore {
  std::uint64_t uuid = 0;
  Symbol entity;
  EntityKind kind = EntityKind::process;
  double score = 0.0;
  Label truth = Label::benign;
};

struct Verdict {
  std::uint64_t uuid = 0;
  Symbol entity;
  EntityKind kind = EntityKind::process;
  double score = 0.0;
  Label predicted = Label::benign;
  Label truth = Label::benign;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Linear-interpolation percentile (the usual "type 7" estimator), p in [0,100].
inline double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) throw Error("percentile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// Learns the benign reference set: one type vector per training node, with
/// duplicates collapsed. Also computes leave-one-out scores of the training
/// nodes, whose 95th percentile is the default threshold.
inline DetectorModel train(const ProvGraph& g, std::size_t k = kDefaultHops, std::size_t cap = kDefaultNeighborCap,
                           unsigned jobs = 1) {
  if (g.node_count() == 0) throw Error("cannot train on an empty graph");
  DetectorModel m;
  m.k = k;
  m.cap = cap;
  m.universe.add(g);
  m.train_node_count = g.node_count();

  auto vecs = node_vectors(g, m.universe, k, cap, jobs);
  std::vector<std::vector<std::uint32_t>> counts;
  counts.reserve(vecs.size());
  for (const auto& v : vecs) counts.push_back(v.counts);

  // A vector shared by two training nodes has leave-one-out score 0.
  std::map<std::vector<std::uint32_t>, std::size_t> multiplicity;
  for (const auto& c : counts) ++multiplicity[c];

  m.train_vectors = NearestIndex(std::move(counts), m.universe.size());
  m.loo_scores.assign(vecs.size(), 0.0);
  std::vector<const std::vector<std::uint32_t>*> singles;
  std::vector<std::size_t> single_nodes;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    if (multiplicity[vecs[i].counts] == 1) {
      singles.push_back(&vecs[i].counts);
      single_nodes.push_back(i);
    }
  }
  parallel_for(singles.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t j = begin; j < end; ++j) {
      const double d = m.train_vectors.nearest(*singles[j], /*skip_exact=*/true);
      m.loo_scores[single_nodes[j]] = std::isinf(d) ? 0.0 : d;
    }
  });
  m.default_threshold = percentile(m.loo_scores, kDefaultThresholdPercentile);
  return m;
}

/// Score of the given test nodes = distance from each node's type vector to
/// the nearest training vector. Tuples unseen in training extend the
/// universe; training vectors count zero there.
inline std::vector<NodeScore> score_nodes(const DetectorModel& m, const ProvGraph& test,
                                          std::span<const std::uint32_t> nodes, unsigned jobs = 1) {
  TupleUniverse universe = m.universe;
  universe.add(test);
  auto vecs = node_vectors(test, universe, nodes, m.k, m.cap, jobs);

  // Score each distinct vector once.
  std::vector<std::uint32_t> order(vecs.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vecs[a].counts < vecs[b].counts; });
  std::vector<std::uint32_t> group(vecs.size());
  std::vector<std::uint32_t> representatives;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || vecs[order[i]].counts != vecs[order[i - 1]].counts) representatives.push_back(order[i]);
    group[order[i]] = static_cast<std::uint32_t>(representatives.size() - 1);
  }
  std::vector<double> distinct(representatives.size());
  parallel_for(representatives.size(), jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t j = begin; j < end; ++j) distinct[j] = m.train_vectors.nearest(vecs[representatives[j]].counts);
  });

  std::vector<NodeScore> out(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    const auto& n = test.nodes()[nodes[i]];
    out[i] = NodeScore{n.uuid, n.entity, n.kind, distinct[group[i]], n.label};
  }
  return out;
}

/// Scores every node of `test`, in node order.
inline std::vector<NodeScore> score_all(const DetectorModel& m, const ProvGraph& test, unsigned jobs = 1) {
  return score_nodes(m, test, all_nodes(test), jobs);
}

/// A node is predicted malicious iff its score is strictly above `threshold`.
inline std::vector<Verdict> apply_threshold(std::span<const NodeScore> scores, double threshold) {
  if (!(threshold >= 0.0)) throw Error("threshold must be >= 0");
  std::vector<Verdict> out;
  out.reserve(scores.size());
  for (const auto& s : scores)
    out.push_back({s.uuid, s.entity, s.kind, s.score, s.score > threshold ? Label::malicious : Label::benign, s.truth});
  return out;
}

inline std::vector<Verdict> apply_threshold(const std::vector<NodeScore>& scores, double threshold) {
  return apply_threshold(std::span<const NodeScore>(scores), threshold);
}

}  // namespace provkit
