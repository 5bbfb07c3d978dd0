#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "provkit/detector.hpp"
#include "provkit/louvain.hpp"
#include "provkit/parallel.hpp"

namespace provkit {

inline constexpr std::size_t kDefaultCommunitySizeThreshold = 20;
inline constexpr std::size_t kDefaultKnn = 10;
inline constexpr double kTieTolerance = 1e-9;

struct Behavior {
  ActionKind action = ActionKind::read;
  Symbol object;  // entity key
  std::int64_t timestamp = 0;
};

/// Everything one process entity did, in event order.
struct ProcessProfile {
  Symbol process_key;
  std::vector<Behavior> behaviors;
};

/// Collects the behaviors of each alerted process entity. Output is sorted
/// by process key.
inline std::vector<ProcessProfile> profile(std::span<const Event> events, const std::set<Symbol>& alerted) {
  std::map<Symbol, ProcessProfile> acc;
  for (const auto key : alerted) acc[key].process_key = key;
  for (const auto& ev : events) {
    const Symbol key = entity_key(ev.subject);
    auto it = acc.find(key);
    if (it == acc.end()) continue;
    it->second.behaviors.push_back({ev.action, entity_key(ev.object), ev.timestamp});
  }
  std::vector<ProcessProfile> out;
  out.reserve(acc.size());
  for (auto& [key, p] : acc) {
    if (p.behaviors.empty()) throw Error("alerted process '" + key.string() + "' has no events");
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<ProcessProfile> profile(const std::vector<Event>& events, const std::set<Symbol>& alerted) {
  return profile(std::span<const Event>(events), alerted);
}

/// Sparse TF-IDF vector; entries are (object index, weight) sorted by index,
/// zero weights omitted.
struct TfIdfVector {
  Symbol process_key;
  std::vector<std::pair<std::uint32_t, double>> weights;

  double weight(std::uint32_t object) const {
    auto it = std::lower_bound(weights.begin(), weights.end(), object,
                               [](const auto& p, std::uint32_t o) { return p.first < o; });
    return it != weights.end() && it->first == object ? it->second : 0.0;
  }
};

struct TfIdfCorpus {
  std::vector<Symbol> objects;  // object index -> entity key, sorted
  std::vector<TfIdfVector> vectors;

  std::uint32_t object_index(Symbol key) const {
    auto it = std::lower_bound(objects.begin(), objects.end(), key);
    if (it == objects.end() || *it != key) throw Error("object '" + key.string() + "' not in corpus");
    return static_cast<std::uint32_t>(it - objects.begin());
  }
};

/// weight(p, o) = freq(p, o) * ln(N / n_o), where N is the number of
/// profiles and n_o the number of profiles touching o.
inline TfIdfCorpus tfidf(std::span<const ProcessProfile> profiles) {
  TfIdfCorpus corpus;
  std::set<Symbol> objects;
  for (const auto& p : profiles)
    for (const auto& b : p.behaviors) objects.insert(b.object);
  corpus.objects.assign(objects.begin(), objects.end());

  std::vector<std::map<std::uint32_t, std::size_t>> freq(profiles.size());
  std::vector<std::size_t> doc_freq(corpus.objects.size(), 0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (const auto& b : profiles[i].behaviors) ++freq[i][corpus.object_index(b.object)];
    for (const auto& [o, _] : freq[i]) ++doc_freq[o];
  }

  const double n = static_cast<double>(profiles.size());
  corpus.vectors.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    TfIdfVector v{profiles[i].process_key, {}};
    for (const auto& [o, f] : freq[i]) {
      const double w = static_cast<double>(f) * std::log(n / static_cast<double>(doc_freq[o]));
      if (w != 0.0) v.weights.emplace_back(o, w);
    }
    corpus.vectors.push_back(std::move(v));
  }
  return corpus;
}

inline TfIdfCorpus tfidf(const std::vector<ProcessProfile>& p) { return tfidf(std::span<const ProcessProfile>(p)); }

/// Euclidean distance between two sparse vectors over the same object index.
inline double sparse_distance(const TfIdfVector& a, const TfIdfVector& b) {
  double sum = 0.0;
  auto i = a.weights.begin(), j = b.weights.begin();
  while (i != a.weights.end() || j != b.weights.end()) {
    if (j == b.weights.end() || (i != a.weights.end() && i->first < j->first)) {
      sum += i->second * i->second;
      ++i;
    } else if (i == a.weights.end() || j->first < i->first) {
      sum += j->second * j->second;
      ++j;
    } else {
      const double d = i->second - j->second;
      sum += d * d;
      ++i;
      ++j;
    }
  }
  return std::sqrt(sum);
}

/// How directed kNN lists become undirected edges: union keeps i-j if
/// either lists the other, mutual only if both do.
enum class KnnMode : std::uint8_t { union_, mutual };

inline constexpr std::string_view to_string(KnnMode m) { return m == KnnMode::mutual ? "mutual" : "union"; }

inline KnnMode knn_mode_from_string(std::string_view s) {
  if (s == "union") return KnnMode::union_;
  if (s == "mutual") return KnnMode::mutual;
  throw Error("unknown knn mode '" + std::string(s) + "' (expected union or mutual)");
}

/// kNN graph over the vectors, weighted 1 / (1 + distance). Neighbours tied
/// with the k-th distance are all kept, so the graph does not depend on input
/// order. Node i of the result is vectors[i].
inline WeightedGraph similarity_graph(std::span<const TfIdfVector> vectors, std::size_t knn = kDefaultKnn,
                                      unsigned jobs = 1, KnnMode mode = KnnMode::mutual) {
  if (vectors.size() < 2) throw Error("similarity_graph: need at least 2 vectors");
  if (knn == 0) throw Error("similarity_graph: knn must be >= 1");
  const std::size_t n = vectors.size();
  std::vector<std::vector<std::pair<double, std::uint32_t>>> nearest(n);
  parallel_for(n, jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<std::pair<double, std::uint32_t>> d;
      d.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) d.emplace_back(sparse_distance(vectors[i], vectors[j]), static_cast<std::uint32_t>(j));
      std::sort(d.begin(), d.end());
      std::size_t take = std::min(knn, d.size());
      const double kth = d[take - 1].first;
      while (take < d.size() && d[take].first <= kth + kTieTolerance * (1.0 + kth)) ++take;
      d.resize(take);
      nearest[i] = std::move(d);
    }
  });
  const auto lists = [&](std::uint32_t a, std::uint32_t b) {
    return std::any_of(nearest[a].begin(), nearest[a].end(), [b](const auto& p) { return p.second == b; });
  };
  WeightedGraph g(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (const auto& [d, j] : nearest[i]) {
      if (mode == KnnMode::mutual && !lists(j, i)) continue;
      if (!g.has_edge(i, j)) g.add_edge(i, j, 1.0 / (1.0 + d));
    }
  return g;
}

inline WeightedGraph similarity_graph(const std::vector<TfIdfVector>& v, std::size_t knn = kDefaultKnn,
                                      unsigned jobs = 1, KnnMode mode = KnnMode::mutual) {
  return similarity_graph(std::span<const TfIdfVector>(v), knn, jobs, mode);
}

struct Community {
  std::uint32_t id = 0;
  std::vector<Symbol> members;  // sorted
  std::size_t size() const noexcept { return members.size(); }
};

/// Groups `keys` by a membership vector; community ids follow `membership`.
inline std::vector<Community> communities_from(std::span<const Symbol> keys,
                                               const std::vector<std::uint32_t>& membership) {
  std::map<std::uint32_t, Community> acc;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto& c = acc[membership[i]];
    c.id = membership[i];
    c.members.push_back(keys[i]);
  }
  std::vector<Community> out;
  for (auto& [_, c] : acc) {
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c));
  }
  return out;
}

struct FpFlags {
  std::set<Symbol> fp_processes;
  std::size_t community_count = 0;
  std::vector<Symbol> representatives;  // smallest key of each community, by community id
};

/// Members of communities strictly larger than `threshold` are deemed false
/// positives.
inline FpFlags flag_false_positives(std::span<const Community> communities,
                                    std::size_t threshold = kDefaultCommunitySizeThreshold) {
  if (threshold < 1) throw Error("community size threshold must be >= 1");
  FpFlags f;
  f.community_count = communities.size();
  for (const auto& c : communities) {
    if (c.members.empty()) continue;
    f.representatives.push_back(*std::min_element(c.members.begin(), c.members.end()));
    if (c.size() > threshold) f.fp_processes.insert(c.members.begin(), c.members.end());
  }
  return f;
}

inline FpFlags flag_false_positives(const std::vector<Community>& c,
                                    std::size_t threshold = kDefaultCommunitySizeThreshold) {
  return flag_false_positives(std::span<const Community>(c), threshold);
}

struct FpReductionOptions {
  std::size_t size_threshold = kDefaultCommunitySizeThreshold;
  std::size_t knn = kDefaultKnn;
  unsigned jobs = 1;
  KnnMode mode = KnnMode::mutual;
};

struct ProcessAssignment {
  Symbol process_key;
  std::uint32_t community_id = 0;
  std::size_t community_size = 0;
  bool flagged = false;
  Symbol representative;
};

struct FpReductionResult {
  std::vector<ProcessAssignment> assignments;  // sorted by process key
  std::vector<Community> communities;
  FpFlags flags;
  std::vector<Verdict> reduced;  // input verdicts with flagged processes cleared
};

/// Clusters the alerted processes and clears alerts on process nodes whose
/// entity lands in a community above the size threshold. Alerts on other
/// node kinds pass through unchanged.
inline FpReductionResult reduce_false_positives(std::span<const Verdict> verdicts, std::span<const Event> events,
                                                const FpReductionOptions& opt = {}) {
  std::set<Symbol> alerted;
  for (const auto& v : verdicts)
    if (v.predicted == Label::malicious && v.kind == EntityKind::process) alerted.insert(v.entity);

  FpReductionResult r;
  const auto profiles = profile(events, alerted);
  std::vector<Symbol> keys;
  for (const auto& p : profiles) keys.push_back(p.process_key);

  std::vector<std::uint32_t> membership(keys.size(), 0);
  if (keys.size() >= 2) {
    const auto corpus = tfidf(profiles);
    membership = louvain(similarity_graph(corpus.vectors, opt.knn, opt.jobs, opt.mode));
  }
  r.communities = communities_from(keys, membership);
  r.flags = flag_false_positives(r.communities, opt.size_threshold);

  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& c = r.communities[membership[i]];
    r.assignments.push_back({keys[i], c.id, c.size(), r.flags.fp_processes.contains(keys[i]), c.members.front()});
  }

  r.reduced.assign(verdicts.begin(), verdicts.end());
  for (auto& v : r.reduced)
    if (v.kind == EntityKind::process && v.predicted == Label::malicious && r.flags.fp_processes.contains(v.entity))
      v.predicted = Label::benign;
  return r;
}

inline FpReductionResult reduce_false_positives(const std::vector<Verdict>& verdicts,
                                                const std::vector<Event>& events, const FpReductionOptions& opt = {}) {
  return reduce_false_positives(std::span<const Verdict>(verdicts), std::span<const Event>(events), opt);
}

}  // namespace provkit
