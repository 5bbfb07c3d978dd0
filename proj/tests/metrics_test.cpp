#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "provkit/provkit.hpp"

using namespace provkit;

namespace {

Verdict verdict(std::uint64_t id, Label predicted, Label truth, double score = 0.0, std::string_view entity = "e") {
  return {id, Symbol(entity), EntityKind::process, score, predicted, truth};
}

constexpr Label B = Label::benign;
constexpr Label M = Label::malicious;

}  // namespace

TEST(Confusion, AllCorrectBenign) {
  std::vector<Verdict> v;
  for (int i = 0; i < 4; ++i) v.push_back(verdict(i, B, B));
  EXPECT_EQ(confusion(v), (Confusion{0, 4, 0, 0}));
}

TEST(Confusion, Inverted) {
  const std::vector<Verdict> v{verdict(1, M, B), verdict(2, B, M)};
  EXPECT_EQ(confusion(v), (Confusion{0, 0, 1, 1}));
}

TEST(Confusion, TenVerdicts) {
  // pred/truth pairs: 3 TP, 4 TN, 2 FP, 1 FN
  const std::vector<std::pair<Label, Label>> pairs{{M, M}, {M, M}, {M, M}, {B, B}, {B, B},
                                                   {B, B}, {B, B}, {M, B}, {M, B}, {B, M}};
  std::vector<Verdict> v;
  for (std::size_t i = 0; i < pairs.size(); ++i) v.push_back(verdict(i, pairs[i].first, pairs[i].second));
  const auto c = confusion(v);
  EXPECT_EQ(c, (Confusion{3, 4, 2, 1}));
  EXPECT_DOUBLE_EQ(c.tpr(), 0.75);
  EXPECT_DOUBLE_EQ(c.fpr(), 2.0 / 6.0);
}

TEST(Confusion, EmptyIsError) { EXPECT_THROW(confusion(std::vector<Verdict>{}), Error); }

TEST(Auc, Separated) {
  const std::vector<ScoredLabel> s{{1, false}, {2, false}, {3, true}, {4, true}};
  EXPECT_DOUBLE_EQ(auc(s), 1.0);
}

TEST(Auc, AllTied) {
  const std::vector<ScoredLabel> s{{1, false}, {1, true}, {1, true}, {1, false}, {1, false}};
  EXPECT_DOUBLE_EQ(auc(s), 0.5);
}

TEST(Auc, SingleClassIsError) {
  const std::vector<ScoredLabel> s{{1, true}, {2, true}};
  EXPECT_THROW(auc(s), Error);
}

TEST(Auc, MatchesPairwise) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 30; ++trial) {
    const auto xs = oracle::random_scores(rng, 50);
    EXPECT_NEAR(auc(xs), oracle::pairwise_auc(xs), 1e-9);
  }
}

TEST(Roc, EndsAtOneOne) {
  const std::vector<ScoredLabel> s{{0.1, false}, {0.4, true}, {0.4, false}, {0.8, true}};
  const auto r = roc_curve(s);
  EXPECT_EQ(r.front(), std::make_pair(0.0, 0.0));
  EXPECT_EQ(r.back(), std::make_pair(1.0, 1.0));
  EXPECT_EQ(r.size(), 4u);
  EXPECT_EQ(r[1], std::make_pair(0.0, 0.5));
}

TEST(Pearson, ExactLines) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(2 * v + 1);
    down.push_back(-v);
  }
  EXPECT_NEAR(pearson(x, up).r, 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, down).r, -1.0, 1e-12);
}

TEST(Pearson, Fixture) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 6};
  const auto c = pearson(x, y);
  EXPECT_NEAR(c.r, oracle::pearson_r(x, y), 1e-12);
  EXPECT_NEAR(c.r, 10.0 / std::sqrt(148.0), 1e-12);
  EXPECT_EQ(c.n, 5u);
  // Student t with 3 df has a closed-form cdf
  const double t = c.r * std::sqrt(3.0 / (1.0 - c.r * c.r));
  const double tail = 0.5 - (t / (std::sqrt(3.0) * (1.0 + t * t / 3.0)) + std::atan(t / std::sqrt(3.0))) / M_PI;
  EXPECT_NEAR(c.p_value, 2.0 * tail, 1e-9);
  // all 120 pairings
  const auto perm = pearson(x, y, PValueMethod::permutation);
  std::vector<std::size_t> idx{0, 1, 2, 3, 4};
  std::size_t hits = 0, total = 0;
  do {
    std::vector<double> py;
    for (auto i : idx) py.push_back(y[i]);
    if (std::abs(oracle::pearson_r(x, py)) >= std::abs(c.r) - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(idx.begin(), idx.end()));
  EXPECT_DOUBLE_EQ(perm.p_value, static_cast<double>(hits) / static_cast<double>(total));
}

TEST(Pearson, ZeroVarianceIsError) {
  EXPECT_THROW(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST(EntityDedup, DistinctEntities) {
  std::vector<Verdict> v;
  std::unordered_map<std::uint64_t, Symbol> ent;
  for (std::uint64_t i = 0; i < 5; ++i) {
    v.push_back(verdict(i, M, M));
    ent[i] = Symbol("e" + std::to_string(i));
  }
  const auto c = entity_dedup(v, ent);
  EXPECT_EQ(c.tp_entity, 5u);
  EXPECT_DOUBLE_EQ(c.expansion_ratio, 1.0);
}

TEST(EntityDedup, OneEntity) {
  std::vector<Verdict> v;
  std::unordered_map<std::uint64_t, Symbol> ent;
  for (std::uint64_t i = 0; i < 10; ++i) {
    v.push_back(verdict(i, M, M));
    ent[i] = Symbol("process:/tmp/x");
  }
  v.push_back(verdict(99, M, B));
  ent[99] = Symbol("process:/bin/ok");
  const auto c = entity_dedup(v, ent);
  EXPECT_EQ(c.tp_entity, 1u);
  EXPECT_EQ(c.fp_entity, 1u);
  EXPECT_DOUBLE_EQ(c.expansion_ratio, 10.0);
}

TEST(EntityDedup, UncoveredIsError) {
  const std::vector<Verdict> v{verdict(1, M, M)};
  EXPECT_THROW(entity_dedup(v, std::unordered_map<std::uint64_t, Symbol>{}), Error);
}

TEST(EntityDedup, MiningSplitsNodes) {
  const auto s = generate(scenario_preset("mining", 42));
  const auto g = build(s.test_events(), preset(IdMap::standard));
  std::vector<Verdict> v;
  for (const auto& n : g.nodes())
    v.push_back({n.uuid, n.entity, n.kind, 1.0, n.label, n.label});  // perfect detector
  const auto c = entity_dedup(v, g);
  EXPECT_GT(c.expansion_ratio, 1.0);
}

TEST(FprTrend, Slope) {
  const auto up = fpr_trend({0.1, 0.2, 0.2, 0.4});
  EXPECT_TRUE(up.trend_nondecreasing);
  EXPECT_NEAR(up.slope, 0.09, 1e-12);
  EXPECT_FALSE(fpr_trend({0.4, 0.3, 0.1}).trend_nondecreasing);
  EXPECT_TRUE(fpr_trend({0.2}).trend_nondecreasing);
}

TEST(FprSeries, TrainingDayHasNoFalsePositives) {
  const auto s = generate(scenario_preset("quiet", 4));
  const auto strategy = preset(IdMap::standard);
  const auto day0 = s.days[0].events;
  const auto model = train(build(day0, strategy));
  const std::vector<std::vector<Event>> days{day0};
  const auto series = fpr_series(model, days, 0.0, strategy);
  EXPECT_EQ(series.fpr, std::vector<double>{0.0});

  const std::vector<std::vector<Event>> empty{{}};
  EXPECT_THROW(fpr_series(model, empty, 0.0, strategy), Error);
}

TEST(FprSeries, NoveltyRampRaisesFpr) {
  auto spec = scenario_preset("quiet", 8);
  spec.days = 10;
  spec.train_days = 3;
  spec.fp_archetypes = {FpArchetype::unknown};
  spec.novelty_ramp = true;
  const auto s = generate(spec);
  const auto strategy = preset(IdMap::standard);
  const auto model = train(build(s.train_events(), strategy));
  std::vector<std::vector<Event>> days;
  for (const auto& d : s.days)
    if (d.test) days.push_back(d.events);
  ASSERT_EQ(days.size(), 7u);
  const auto series = fpr_series(model, days, model.default_threshold, strategy);
  EXPECT_TRUE(series.trend_nondecreasing);
  EXPECT_GT(series.slope, 0.0);
}

TEST(Evaluate, SummaryRow) {
  const std::vector<Verdict> v{verdict(1, M, M, 3.0), verdict(2, B, B, 0.5), verdict(3, M, B, 2.0)};
  const auto r = evaluate(v, 1.0);
  ASSERT_TRUE(r.auc);
  EXPECT_DOUBLE_EQ(*r.auc, 1.0);
  EXPECT_EQ(summary_csv_header(), "Method,TPR,FPR,AUC,TP,TN,FN,FP");
  EXPECT_EQ(summary_csv_row(r).substr(0, 8), "provkit,");
}
