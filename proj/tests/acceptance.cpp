// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "provkit/provkit.hpp"

using namespace provkit;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kAucTol = 1e-9;
constexpr double kModularityTol = 1e-9;
constexpr double kTfIdfTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kFprFactor = 0.5;
constexpr std::size_t kFprDaysNeeded = 5;
constexpr double kCommunityFactor = 0.5;
constexpr std::size_t kCommunitySizeThreshold = 20;
constexpr double kMinCorrelation = 0.5;
constexpr double kMaxPValue = 0.05;
constexpr double kMinAucSpread = 0.02;
constexpr double kMaxExponent = 1.3;
constexpr double kLouvainExactShare = 0.95;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned cores() { return std::max(1u, std::thread::hardware_concurrency()); }

fs::path work_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / "provkit_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome auc_oracle() {
  Stopwatch w;
  std::mt19937_64 rng(20240501);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const auto xs = oracle::random_scores(rng, 1000);
    worst = std::max(worst, std::abs(auc(xs) - oracle::pairwise_auc(xs)));
  }
  const double secs = w.seconds();
  return {worst <= kAucTol && secs < 10.0, fmt("200 fixtures, max |diff| %.3g, %.2f s", worst, secs)};
}

Outcome louvain_optimum() {
  Stopwatch w;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  int exact = 0;
  double max_gap = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = oracle::random_connected_graph(rng, size(rng));
    const double got = oracle::dense_modularity(g, louvain(g));
    const double gap = oracle::best_modularity(g) - got;
    max_gap = std::max(max_gap, gap);
    if (gap <= kModularityTol) ++exact;
  }
  const double secs = w.seconds();
  return {exact >= kLouvainExactShare * 100 && secs < 60.0,
          fmt("%d/100 optimal, max gap %.3g, %.2f s", exact, max_gap, secs)};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint32_t> count(0, 30);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    std::array<TypeVector, 3> v;
    for (auto& x : v) {
      x.counts.resize(12);
      for (auto& c : x.counts) c = count(rng);
    }
    const double ab = distance(v[0], v[1]), ba = distance(v[1], v[0]);
    const double bc = distance(v[1], v[2]), ac = distance(v[0], v[2]);
    if (distance(v[0], v[0]) != 0.0 || ab != ba || ac > ab + bc + kMetricTol) ++violations;
    if (std::abs(ab - oracle::euclid(v[0].counts, v[1].counts)) > kMetricTol) ++violations;
  }
  std::size_t tree_mismatch = 0, checked = 0;
  std::uniform_int_distribution<std::size_t> size(2, 50);
  for (int t = 0; t < 100; ++t) {
    const auto tree = oracle::random_tree(rng, size(rng));
    const auto g = build(tree.events, preset(IdMap::standard));
    for (std::size_t v = 0; v < tree.parent.size(); ++v) {
      std::multiset<std::uint16_t> got;
      for (const auto& x : info(g, make_uuid(oracle::tree_node(v, tree.kind[v]), g.strategy()), 2, kUnlimitedCap))
        got.insert(x.code());
      tree_mismatch += got != oracle::tree_neighborhood(tree, v, 2);
      ++checked;
    }
  }
  return {violations == 0 && tree_mismatch == 0,
          fmt("1000 triples, %zu axiom violations; %zu/%zu tree neighbourhoods differ", violations, tree_mismatch,
              checked)};
}

Outcome tfidf_cases() {
  const auto prof = [](std::string_view key, std::vector<std::string_view> objs) {
    ProcessProfile p{Symbol(key), {}};
    for (auto o : objs) p.behaviors.push_back({ActionKind::read, Symbol(o), 0});
    return p;
  };
  bool ok = true;
  // object touched by every process
  const auto u = tfidf(std::vector<ProcessProfile>{prof("a", {"all", "x"}), prof("b", {"all"}), prof("c", {"all", "y"})});
  for (const auto& v : u.vectors) ok &= v.weight(u.object_index(Symbol("all"))) == 0.0;
  // single process
  const auto s = tfidf(std::vector<ProcessProfile>{prof("a", {"x", "y", "y"})});
  ok &= s.vectors.size() == 1 && s.vectors[0].weights.empty();
  // two processes: o 3x by p1 only, shared by both, r 2x by p2 only
  const auto t = tfidf(std::vector<ProcessProfile>{prof("p1", {"o", "shared", "o", "o"}), prof("p2", {"r", "shared", "r"})});
  const double ln2 = std::log(2.0);
  const double e1 = std::abs(t.vectors[0].weight(t.object_index(Symbol("o"))) - 3 * ln2);
  const double e2 = std::abs(t.vectors[1].weight(t.object_index(Symbol("r"))) - 2 * ln2);
  ok &= e1 <= kTfIdfTol && e2 <= kTfIdfTol;
  ok &= t.vectors[0].weight(t.object_index(Symbol("shared"))) == 0.0;
  ok &= t.vectors[1].weight(t.object_index(Symbol("o"))) == 0.0;
  return {ok, fmt("p1 weight %.12f (3 ln 2 = %.12f)", t.vectors[0].weight(t.object_index(Symbol("o"))), 3 * ln2)};
}

Outcome fp_reduction_effect() {
  Stopwatch w;
  const auto spec = scenario_preset("ever_changing", 42);
  RunConfig cfg;
  cfg.scenario = spec;
  cfg.jobs = cores();
  const auto r = execute(traces_from_scenario(generate(spec)), cfg);
  std::size_t halved = 0;
  bool communities_ok = r.days.size() == 7;
  std::string per_day;
  for (const auto& d : r.days) {
    const double pre = d.process_counts.fpr();
    const double post = d.reduced_process_counts->fpr();
    if (post <= kFprFactor * pre) ++halved;
    const auto fp_alerts = d.process_counts.fp;
    communities_ok &= d.fp->flags.community_count <= kCommunityFactor * static_cast<double>(fp_alerts);
    per_day += fmt(" %.3f->%.3f(%zu/%zu)", pre, post, d.fp->flags.community_count, fp_alerts);
  }
  const double secs = w.seconds();
  return {halved >= kFprDaysNeeded && communities_ok && secs < 120.0,
          fmt("%zu/7 days halved, communities/FP ok=%d, %.1f s; process FPR pre->post(communities/FPs):", halved,
              communities_ok, secs) +
              per_day};
}

Outcome attack_preservation() {
  std::size_t violations = 0, malicious_alerted = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto spec = scenario_preset("mining", seed);
    RunConfig cfg;
    cfg.scenario = spec;
    cfg.jobs = cores();
    cfg.fp.threshold = kCommunitySizeThreshold;
    const auto r = execute(traces_from_scenario(generate(spec)), cfg);
    for (const auto& d : r.days) {
      std::set<Symbol> attack;
      for (const auto& v : d.verdicts)
        if (v.kind == EntityKind::process && v.truth == Label::malicious) attack.insert(v.entity);
      for (const auto& a : d.fp->assignments) {
        if (!attack.contains(a.process_key)) continue;
        ++malicious_alerted;
        violations += a.flagged;
      }
    }
  }
  return {violations == 0,
          fmt("10 seeds, %zu alerted attack processes, %zu flagged as FP", malicious_alerted, violations)};
}

Outcome distance_ratio_correlation() {
  Stopwatch w;
  std::vector<double> ratios, aucs;
  for (int i = 0; i < 12; ++i) {
    auto spec = scenario_preset("mining", 100 + static_cast<std::uint64_t>(i));
    spec.attack_divergence = static_cast<double>(i % 6) / 5.0;
    RunConfig cfg;
    cfg.scenario = spec;
    cfg.jobs = cores();
    cfg.fp.enabled = false;
    const auto r = execute(traces_from_scenario(generate(spec)), cfg);
    const auto& day = r.days.front();
    std::vector<double> mal, ben;
    for (const auto& v : day.verdicts) (v.truth == Label::malicious ? mal : ben).push_back(v.score);
    ratios.push_back(distance_ratio(mal, ben).ratio);
    aucs.push_back(*day.report.auc);
  }
  const auto c = pearson(ratios, aucs);
  const double secs = w.seconds();
  return {c.r >= kMinCorrelation && c.p_value <= kMaxPValue && secs < 300.0,
          fmt("12 scenarios, r = %.3f, p = %.4f, %.1f s", c.r, c.p_value, secs)};
}

Outcome uuid_sweep() {
  const auto spec = scenario_preset("default", 42);
  RunConfig cfg;
  cfg.scenario = spec;
  cfg.jobs = cores();
  const auto rows = sweep_idmap(traces_from_scenario(generate(spec)), cfg);
  bool edges_const = true, nodes_ok = true;
  double lo = 1, hi = 0;
  std::string text;
  for (const auto& r : rows) {
    edges_const &= r.edge_count == rows[0].edge_count;
    if (r.auc) {
      lo = std::min(lo, *r.auc);
      hi = std::max(hi, *r.auc);
    }
    text += fmt(" %s:%zu/%.3f", std::string(to_string(r.idmap)).c_str(), r.node_count, r.auc.value_or(-1));
  }
  std::size_t steps = 0;
  for (const auto& a : rows)
    for (const auto& b : rows)
      if (a.idmap != b.idmap && is_coarsening(preset(a.idmap), preset(b.idmap))) {
        ++steps;
        nodes_ok &= b.node_count <= a.node_count;
      }
  return {edges_const && nodes_ok && hi - lo >= kMinAucSpread,
          fmt("edges constant=%d, nodes non-increasing over %zu coarsening steps=%d, AUC spread %.3f;", edges_const,
              steps, nodes_ok, hi - lo) +
              text};
}

Outcome entity_dedup_property() {
  const auto spec = scenario_preset("mining", 42);
  const auto traces = traces_from_scenario(generate(spec));
  double ratio[2] = {0, 0};
  std::size_t tp[2] = {0, 0}, tp_entity[2] = {0, 0};
  const IdMap maps[2] = {IdMap::standard, IdMap::idmap3};
  for (int i = 0; i < 2; ++i) {
    RunConfig cfg;
    cfg.scenario = spec;
    cfg.idmap = maps[i];
    cfg.jobs = cores();
    cfg.fp.enabled = false;
    const auto r = execute(traces, cfg);
    tp[i] = r.overall.counts.tp;
    tp_entity[i] = r.overall.tp_entity;
    ratio[i] = r.overall.expansion_ratio;
  }
  const bool ok = tp[0] >= tp_entity[0] && ratio[0] > 1.0 && ratio[1] < ratio[0];
  return {ok, fmt("DEFAULT tp %zu, tp_entity %zu, ratio %.3f; IDMAP3 tp %zu, tp_entity %zu, ratio %.3f", tp[0],
                  tp_entity[0], ratio[0], tp[1], tp_entity[1], ratio[1])};
}

Outcome determinism() {
  std::vector<ScenarioSpec> specs{scenario_preset("mining", 5), scenario_preset("quiet", 6),
                                  scenario_preset("ever_changing", 7)};
  specs[2].days = 5;
  std::size_t identical = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto dir = work_dir("determinism_" + std::to_string(i));
    RunConfig base;
    base.scenario = specs[i];
    base.jobs = cores();
    std::ofstream(dir / "config.json") << to_json(base).dump(2);
    std::string reports[2];
    for (int run = 0; run < 2; ++run) {
      auto cfg = load_run_config(dir / "config.json");
      cfg.output_dir = (dir / ("run" + std::to_string(run))).string();
      run_pipeline(cfg);
      reports[run] = slurp(dir / ("run" + std::to_string(run)) / "report.json");
    }
    identical += !reports[0].empty() && reports[0] == reports[1];
  }
  return {identical == specs.size(), fmt("%zu/%zu scenarios byte-identical", identical, specs.size())};
}

Outcome throughput() {
  const std::size_t sizes[] = {10'000, 100'000, 1'000'000};
  std::vector<double> xs, ys;
  std::string text;
  double largest = 0;
  for (auto n : sizes) {
    ScenarioSpec s;
    s.seed = 7;
    s.attacks = {AttackKind::mining};
    s.days = 2;
    s.train_days = 1;
    s.scale = n / 2;
    RunConfig cfg;
    cfg.scenario = s;
    cfg.fp.enabled = false;
    cfg.jobs = cores();
    const auto dir = work_dir("throughput_" + std::to_string(n));
    cfg.output_dir = dir.string();
    const auto r = run_pipeline(cfg);
    std::size_t events = r.train_stats.edge_count;
    for (const auto& d : r.days) events += d.events;

    // per-stage costs as recorded in timing.csv
    double secs = 0;
    std::ifstream in(dir / "timing.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto name = line.substr(0, c1);
      if (name == "build_train" || name == "train" || name == "build_test" || name == "detect")
        secs += std::stod(line.substr(c1 + 1));
    }
    xs.push_back(std::log(static_cast<double>(events)));
    ys.push_back(std::log(secs));
    largest = secs;
    text += fmt(" %zu events: %.2f s;", events, secs);
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double exponent = sxy / sxx;
  return {exponent <= kMaxExponent && largest < 300.0, fmt("fit exponent %.3f;", exponent) + text};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"auc oracle equivalence", auc_oracle},
      {"louvain optimality on small graphs", louvain_optimum},
      {"type-vector metric axioms and tree neighbourhoods", metric_axioms},
      {"tf-idf analytic cases", tfidf_cases},
      {"false-positive reduction effect", fp_reduction_effect},
      {"attack preservation under reduction", attack_preservation},
      {"distance ratio vs auc correlation", distance_ratio_correlation},
      {"uuid strategy sweep", uuid_sweep},
      {"entity dedup property", entity_dedup_property},
      {"end-to-end determinism", determinism},
      {"throughput", throughput},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(fs::temp_directory_path() / "provkit_acceptance");
  return failed == 0 ? 0 : 1;
}
