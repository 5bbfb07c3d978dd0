#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "provkit/provkit.hpp"

using namespace provkit;

namespace {

Event ev(std::uint64_t seq, std::string_view proc, ActionKind a, EntityAttrs o) {
  return Event{seq, static_cast<std::int64_t>(seq), process_attrs(1, proc), a, std::move(o), Label::benign};
}

ProcessProfile prof(std::string_view key, std::vector<std::string_view> objects) {
  ProcessProfile p{Symbol(key), {}};
  for (auto o : objects) p.behaviors.push_back({ActionKind::read, Symbol(o), 0});
  return p;
}

TfIdfVector vec(std::vector<std::pair<std::uint32_t, double>> w) { return {Symbol("p"), std::move(w)}; }

Community community(std::size_t n, std::string_view prefix, std::uint32_t id) {
  Community c{id, {}};
  for (std::size_t i = 0; i < n; ++i) c.members.push_back(Symbol(std::string(prefix) + std::to_string(100 + i)));
  std::sort(c.members.begin(), c.members.end());
  return c;
}

}  // namespace

TEST(Profile, ThreeEvents) {
  const std::vector<Event> events{ev(0, "/bin/a", ActionKind::read, file_attrs("/x")),
                                  ev(1, "/bin/a", ActionKind::write, file_attrs("/y")),
                                  ev(2, "/bin/b", ActionKind::read, file_attrs("/x")),
                                  ev(3, "/bin/a", ActionKind::del, file_attrs("/x"))};
  const auto p = profile(events, {Symbol("process:/bin/a")});
  ASSERT_EQ(p.size(), 1u);
  ASSERT_EQ(p[0].behaviors.size(), 3u);
  EXPECT_EQ(p[0].behaviors[1].action, ActionKind::write);
  EXPECT_EQ(p[0].behaviors[1].object.str(), "file:/y");
  EXPECT_TRUE(profile(events, {}).empty());
  EXPECT_THROW(profile(events, {Symbol("process:/bin/none")}), Error);
}

TEST(Profile, MiningTraceRecount) {
  const auto s = generate(scenario_preset("mining", 42));
  const auto& day = s.days[s.spec.train_days].events;
  std::set<Symbol> alerted;
  for (const auto& e : day)
    if (e.label == Label::malicious || e.subject.path.str().find("hwinfo") != std::string_view::npos)
      alerted.insert(entity_key(e.subject));
  const auto profiles = profile(day, alerted);
  ASSERT_EQ(profiles.size(), alerted.size());
  for (const auto& p : profiles) {
    const auto path = p.process_key.str().substr(std::string_view("process:").size());
    std::size_t n = 0;
    for (const auto& e : day) n += e.subject.path.str() == path;
    EXPECT_EQ(p.behaviors.size(), n) << path;
  }
}

TEST(TfIdf, UniversalObjectIsZero) {
  const std::vector<ProcessProfile> ps{prof("a", {"lib", "x"}), prof("b", {"lib", "y"}), prof("c", {"lib"})};
  const auto c = tfidf(ps);
  const auto lib = c.object_index(Symbol("lib"));
  for (const auto& v : c.vectors) EXPECT_EQ(v.weight(lib), 0.0);
}

TEST(TfIdf, SingleProcessAllZero) {
  const auto c = tfidf(std::vector<ProcessProfile>{prof("a", {"x", "x", "y"})});
  ASSERT_EQ(c.vectors.size(), 1u);
  EXPECT_TRUE(c.vectors[0].weights.empty());
}

TEST(TfIdf, TwoProcessFixture) {
  const std::vector<ProcessProfile> ps{prof("p1", {"o", "o", "o", "shared", "q"}), prof("p2", {"shared", "r", "r"})};
  const auto c = tfidf(ps);
  const double ln2 = std::log(2.0);
  EXPECT_NEAR(c.vectors[0].weight(c.object_index(Symbol("o"))), 3 * ln2, 1e-12);
  EXPECT_NEAR(c.vectors[0].weight(c.object_index(Symbol("q"))), ln2, 1e-12);
  EXPECT_NEAR(c.vectors[1].weight(c.object_index(Symbol("r"))), 2 * ln2, 1e-12);
  EXPECT_EQ(c.vectors[0].weight(c.object_index(Symbol("shared"))), 0.0);
  EXPECT_EQ(c.vectors[1].weight(c.object_index(Symbol("o"))), 0.0);
  EXPECT_NEAR(3 * ln2, 2.0794, 1e-4);
}

TEST(SparseDistance, MatchesDense) {
  const auto a = vec({{0, 1.0}, {2, 3.0}});
  const auto b = vec({{1, 2.0}, {2, 1.0}});
  EXPECT_NEAR(sparse_distance(a, b), std::sqrt(1.0 + 4.0 + 4.0), 1e-12);
  EXPECT_EQ(sparse_distance(a, a), 0.0);
}

TEST(SimilarityGraph, TwoIdentical) {
  const std::vector<TfIdfVector> v{vec({{0, 1.5}}), vec({{0, 1.5}})};
  const auto g = similarity_graph(v, 10);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.0);
}

TEST(SimilarityGraph, NeedsTwoVectors) {
  EXPECT_THROW(similarity_graph(std::vector<TfIdfVector>{vec({})}, 3), Error);
}

TEST(SimilarityGraph, SaturatedIsComplete) {
  std::vector<TfIdfVector> v;
  for (int i = 0; i < 6; ++i) v.push_back(vec({{0, i * 1.0}, {1, i * i * 0.5}}));
  for (auto mode : {KnnMode::union_, KnnMode::mutual}) {
    const auto g = similarity_graph(v, 5, 1, mode);
    EXPECT_EQ(g.edge_count(), 15u);
  }
}

TEST(SimilarityGraph, BruteForceKnn) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> w(0.0, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial % 9;
    const std::size_t knn = 1 + trial % 3;
    std::vector<TfIdfVector> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(vec({{0, w(rng)}, {1, w(rng)}}));
    // exhaustive: j is a neighbour of i if fewer than knn others are strictly closer
    std::vector<std::vector<bool>> lists(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        std::size_t closer = 0;
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && sparse_distance(v[i], v[k]) < sparse_distance(v[i], v[j])) ++closer;
        lists[i][j] = closer < knn;
      }
    for (auto mode : {KnnMode::union_, KnnMode::mutual}) {
      const auto g = similarity_graph(v, knn, 1, mode);
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
          const bool want = mode == KnnMode::mutual ? lists[i][j] && lists[j][i] : lists[i][j] || lists[j][i];
          EXPECT_EQ(g.has_edge(i, j), want) << "trial " << trial << " " << i << "-" << j;
          if (want) EXPECT_DOUBLE_EQ(g.weight(i, j), 1.0 / (1.0 + sparse_distance(v[i], v[j])));
        }
    }
  }
}

TEST(SimilarityGraph, OutlierPair) {
  // two close points and one far away, knn = 1
  const std::vector<TfIdfVector> v{vec({{0, 0.0}}), vec({{0, 1.0}}), vec({{0, 10.0}})};
  const auto u = similarity_graph(v, 1, 1, KnnMode::union_);
  EXPECT_TRUE(u.has_edge(0, 1));
  EXPECT_TRUE(u.has_edge(1, 2));
  EXPECT_FALSE(u.has_edge(0, 2));
  const auto m = similarity_graph(v, 1, 1, KnnMode::mutual);
  EXPECT_TRUE(m.has_edge(0, 1));
  EXPECT_FALSE(m.has_edge(1, 2));
}

TEST(SimilarityGraph, TiesDoNotDependOnOrder) {
  std::vector<TfIdfVector> v{vec({{0, 0.0}}), vec({{0, 1.0}}), vec({{0, 1.0}}), vec({{0, 1.0}})};
  const auto g = similarity_graph(v, 1, 1, KnnMode::union_);
  for (std::uint32_t j = 1; j < 4; ++j) EXPECT_TRUE(g.has_edge(0, j));
}

TEST(Louvain, TwoCliques) {
  WeightedGraph g(8);
  for (std::uint32_t base : {0u, 4u})
    for (std::uint32_t i = 0; i < 4; ++i)
      for (std::uint32_t j = i + 1; j < 4; ++j) g.add_edge(base + i, base + j, 1.0);
  const auto c = louvain(g);
  for (std::uint32_t i = 1; i < 4; ++i) {
    EXPECT_EQ(c[i], c[0]);
    EXPECT_EQ(c[4 + i], c[4]);
  }
  EXPECT_NE(c[0], c[4]);
  EXPECT_NEAR(modularity(g, c), oracle::best_modularity(g), 1e-9);
}

TEST(Louvain, SingleNode) { EXPECT_EQ(louvain(WeightedGraph(1)), std::vector<std::uint32_t>{0}); }

TEST(Louvain, Edgeless) {
  const auto c = louvain(WeightedGraph(5));
  EXPECT_EQ(std::set<std::uint32_t>(c.begin(), c.end()).size(), 5u);
}

TEST(Louvain, ModularityMatchesDense) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 3 + trial % 6);
    const auto c = louvain(g);
    EXPECT_NEAR(modularity(g, c), oracle::dense_modularity(g, c), 1e-12);
    EXPECT_LE(modularity(g, c), oracle::best_modularity(g) + 1e-12);
  }
}

TEST(Flags, SizeAboveThreshold) {
  const std::vector<Community> big{community(25, "process:/a/", 0)};
  EXPECT_EQ(flag_false_positives(big, 20).fp_processes.size(), 25u);

  const std::vector<Community> edge{community(20, "process:/b/", 0)};
  EXPECT_TRUE(flag_false_positives(edge, 20).fp_processes.empty());

  const std::vector<Community> two{community(25, "process:/c/", 0), community(3, "process:/d/", 1)};
  const auto f = flag_false_positives(two, 20);
  EXPECT_EQ(f.fp_processes.size(), 25u);
  EXPECT_EQ(f.community_count, 2u);
  ASSERT_EQ(f.representatives.size(), 2u);
  EXPECT_EQ(f.representatives[0].str(), "process:/c/100");
  EXPECT_THROW(flag_false_positives(two, 0), Error);
}

TEST(Reduce, ClustersRepeatedHelpers) {
  std::vector<Event> events;
  std::vector<Verdict> verdicts;
  std::uint64_t seq = 0;
  const auto add_alert = [&](const std::string& path) {
    verdicts.push_back({seq + 1, Symbol("process:" + path), EntityKind::process, 9.0, Label::malicious, Label::benign});
  };
  for (int h = 0; h < 30; ++h) {
    const std::string path = "/opt/helper-" + std::to_string(h);
    add_alert(path);
    events.push_back(ev(seq++, path, ActionKind::read, file_attrs("/opt/job.json")));
    for (int i = 0; i < 4; ++i) events.push_back(ev(seq++, path, ActionKind::write, file_attrs("/opt/out" + std::to_string(i))));
  }
  add_alert("/tmp/odd");
  events.push_back(ev(seq++, "/tmp/odd", ActionKind::connect, network_attrs("", "", "10.0.0.1", 1, "9.9.9.9", 80)));
  events.push_back(ev(seq++, "/tmp/odd", ActionKind::write, file_attrs("/etc/cron.d/x")));

  const auto r = reduce_false_positives(verdicts, events);
  EXPECT_EQ(r.flags.fp_processes.size(), 30u);
  EXPECT_FALSE(r.flags.fp_processes.contains(Symbol("process:/tmp/odd")));
  std::size_t still = 0;
  for (const auto& v : r.reduced) still += v.predicted == Label::malicious;
  EXPECT_EQ(still, 1u);
  EXPECT_EQ(r.assignments.size(), 31u);
}

TEST(Reduce, ModeNames) {
  EXPECT_EQ(knn_mode_from_string("mutual"), KnnMode::mutual);
  EXPECT_EQ(knn_mode_from_string("union"), KnnMode::union_);
  EXPECT_THROW(knn_mode_from_string("both"), Error);
}
