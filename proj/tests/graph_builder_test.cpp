#include <gtest/gtest.h>

#include "provkit/provkit.hpp"

using namespace provkit;

namespace {

Event ev(std::uint64_t seq, EntityAttrs s, ActionKind a, EntityAttrs o, Label l = Label::benign) {
  return Event{seq, static_cast<std::int64_t>(seq), std::move(s), a, std::move(o), l};
}

const std::vector<Event>& quiet_events() {
  static const auto events = generate(scenario_preset("quiet", 7)).train_events();
  return events;
}

}  // namespace

TEST(MakeUuid, SameFileSameUuid) {
  const auto s = preset(IdMap::standard);
  EXPECT_EQ(make_uuid(file_attrs("/etc/passwd"), s), make_uuid(file_attrs("/etc/passwd"), s));
  EXPECT_NE(make_uuid(file_attrs("/etc/passwd"), s), make_uuid(file_attrs("/etc/shadow"), s));
}

TEST(MakeUuid, DomainWinsUnderDefault) {
  const auto s = preset(IdMap::standard);
  const auto a = network_attrs("cdn.example", "http://u/1", "10.0.0.1", 4000, "1.1.1.1", 443);
  const auto b = network_attrs("cdn.example", "http://u/2", "10.0.0.2", 4001, "2.2.2.2", 80);
  EXPECT_EQ(make_uuid(a, s), make_uuid(b, s));
  EXPECT_EQ(identity_string(a, s), "network|domain|cdn.example");

  auto no_domain = a;
  no_domain.domain = Symbol();
  EXPECT_EQ(identity_string(no_domain, s), "network|url|http://u/1");
  no_domain.url = Symbol();
  EXPECT_EQ(identity_string(no_domain, s), "network|addr|10.0.0.1|4000|1.1.1.1|443");
}

TEST(MakeUuid, PidSplitsUnderDefaultOnly) {
  const auto p100 = process_attrs(100, "/usr/bin/python3");
  const auto p200 = process_attrs(200, "/usr/bin/python3");
  EXPECT_NE(make_uuid(p100, preset(IdMap::standard)), make_uuid(p200, preset(IdMap::standard)));
  EXPECT_EQ(make_uuid(p100, preset(IdMap::idmap3)), make_uuid(p200, preset(IdMap::idmap3)));
}

TEST(MakeUuid, NetworkPresets) {
  const auto a = network_attrs("cdn.example", "", "10.0.0.1", 4000, "1.1.1.1", 443);
  auto b = a;
  b.src_port = 4001;
  EXPECT_EQ(make_uuid(a, preset(IdMap::standard)), make_uuid(b, preset(IdMap::standard)));
  EXPECT_NE(make_uuid(a, preset(IdMap::idmap1)), make_uuid(b, preset(IdMap::idmap1)));
  EXPECT_EQ(make_uuid(a, preset(IdMap::idmap2)), make_uuid(b, preset(IdMap::idmap2)));
  EXPECT_EQ(make_uuid(a, preset(IdMap::idmap4)), make_uuid(b, preset(IdMap::idmap4)));
}

TEST(MakeUuid, MissingFieldNamesKindStrategyField) {
  EntityAttrs p;
  p.kind = EntityKind::process;
  p.path = Symbol("/bin/x");
  try {
    make_uuid(p, preset(IdMap::standard));
    FAIL();
  } catch (const UuidError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("pid"), std::string::npos);
    EXPECT_NE(w.find("process"), std::string::npos);
    EXPECT_NE(w.find(to_string(preset(IdMap::standard))), std::string::npos);
  }
  EXPECT_NO_THROW(make_uuid(p, preset(IdMap::idmap3)));
}

TEST(MakeUuid, PresetNames) {
  for (auto m : kAllIdMaps) EXPECT_EQ(idmap_from_string(to_string(m)), m);
  EXPECT_FALSE(idmap_from_string("IDMAP9"));
}

TEST(Build, Empty) {
  const auto g = build(std::vector<Event>{}, preset(IdMap::standard));
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(graph_stats(g), GraphStats{});
}

TEST(Build, ThreeEventsTwoNodes) {
  const auto p = process_attrs(1, "/bin/cat");
  const auto f = file_attrs("/etc/hosts");
  const std::vector<Event> events{ev(0, p, ActionKind::open, f), ev(1, p, ActionKind::read, f),
                                  ev(2, p, ActionKind::close, f)};
  const auto g = build(events, preset(IdMap::standard));
  const auto s = graph_stats(g);
  EXPECT_EQ(s.node_count, 2u);
  EXPECT_EQ(s.edge_count, 3u);
  EXPECT_EQ(s.entity_count, 2u);
  EXPECT_EQ(s.nodes_per_kind[static_cast<std::size_t>(EntityKind::process)], 1u);
  EXPECT_EQ(s.nodes_per_kind[static_cast<std::size_t>(EntityKind::file)], 1u);
  const auto idx = g.index_of(make_uuid(p, preset(IdMap::standard)));
  ASSERT_TRUE(idx);
  EXPECT_EQ(g.incident(*idx).size(), 3u);
}

TEST(Build, MaliciousEdgeMarksEndpoints) {
  const auto p = process_attrs(1, "/bin/sh");
  const std::vector<Event> events{ev(0, p, ActionKind::read, file_attrs("/a")),
                                  ev(1, p, ActionKind::write, file_attrs("/b"), Label::malicious)};
  const auto g = build(events, preset(IdMap::standard));
  EXPECT_EQ(g.node(make_uuid(file_attrs("/a"), g.strategy())).label, Label::benign);
  EXPECT_EQ(g.node(make_uuid(file_attrs("/b"), g.strategy())).label, Label::malicious);
  EXPECT_EQ(g.node(make_uuid(p, g.strategy())).label, Label::malicious);
}

TEST(Build, MissingFieldReportsSeq) {
  auto bad = process_attrs(1, "/bin/x");
  bad.pid.reset();
  const std::vector<Event> events{ev(0, process_attrs(1, "/bin/a"), ActionKind::read, file_attrs("/a")),
                                  ev(1, bad, ActionKind::read, file_attrs("/a"))};
  try {
    build(events, preset(IdMap::standard));
    FAIL();
  } catch (const BuildError& e) {
    EXPECT_EQ(e.seq(), 1u);
  }
}

TEST(Build, RepeatedExecutionsShareEntity) {
  const std::vector<Event> events{ev(0, process_attrs(1, "/bin/a"), ActionKind::read, file_attrs("/f")),
                                  ev(1, process_attrs(2, "/bin/a"), ActionKind::read, file_attrs("/f"))};
  const auto g = build(events, preset(IdMap::standard));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.entity_count(), 2u);
  EXPECT_EQ(build(events, preset(IdMap::idmap3)).node_count(), 2u);
}

TEST(Build, CoarseningNeverAddsNodes) {
  const auto& events = quiet_events();
  std::vector<GraphStats> stats;
  for (auto m : kAllIdMaps) stats.push_back(graph_stats(build(events, preset(m))));
  for (std::size_t a = 0; a < kAllIdMaps.size(); ++a) {
    EXPECT_EQ(stats[a].edge_count, events.size());
    EXPECT_EQ(stats[a].entity_count, stats[0].entity_count) << to_string(kAllIdMaps[a]);
    for (std::size_t b = 0; b < kAllIdMaps.size(); ++b) {
      if (!is_coarsening(preset(kAllIdMaps[a]), preset(kAllIdMaps[b]))) continue;
      EXPECT_LE(stats[b].node_count, stats[a].node_count)
          << to_string(kAllIdMaps[a]) << " -> " << to_string(kAllIdMaps[b]);
    }
  }
  EXPECT_LE(stats[4].node_count, stats[0].node_count);  // IDMAP4 vs DEFAULT
}

TEST(Build, IncidentEdgesInTimeOrder) {
  const auto g = build(quiet_events(), preset(IdMap::standard));
  for (std::uint32_t v = 0; v < g.node_count(); v += 17) {
    const auto adj = g.incident(v);
    for (std::size_t i = 1; i < adj.size(); ++i) {
      const auto& x = g.edges()[adj[i - 1]];
      const auto& y = g.edges()[adj[i]];
      EXPECT_LE(std::pair(x.timestamp, x.seq), std::pair(y.timestamp, y.seq));
    }
  }
}

TEST(Build, NoHashCollisionsOnGeneratedTrace) {
  EXPECT_TRUE(build(quiet_events(), preset(IdMap::standard)).collisions().empty());
}
