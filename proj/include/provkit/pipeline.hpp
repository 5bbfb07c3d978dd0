#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provkit/csv.hpp"
#include "provkit/detector.hpp"
#include "provkit/fp_reduction.hpp"
#include "provkit/metrics.hpp"
#include "provkit/trace_gen.hpp"
#include "provkit/version.hpp"

namespace provkit {

struct FpReductionConfig {
  bool enabled = true;
  std::size_t threshold = kDefaultCommunitySizeThreshold;
  std::size_t knn = kDefaultKnn;
  KnnMode mode = KnnMode::mutual;
  friend bool operator==(const FpReductionConfig&, const FpReductionConfig&) = default;
};

/// How a test day's graph is formed. history: training events plus the day,
/// scoring only nodes the day touches (hubs keep their long-run
/// neighbourhood). isolated: the day's events alone.
enum class GraphContext : std::uint8_t { history, isolated };

inline constexpr std::string_view to_string(GraphContext c) { return c == GraphContext::history ? "history" : "isolated"; }

inline GraphContext graph_context_from_string(std::string_view s) {
  if (s == "history") return GraphContext::history;
  if (s == "isolated") return GraphContext::isolated;
  throw Error("unknown graph context '" + std::string(s) + "' (expected history or isolated)");
}

struct RunConfig {
  std::optional<ScenarioSpec> scenario;  // either this or trace paths
  std::vector<std::string> train_traces;
  std::vector<std::string> test_traces;  // one file per test day
  IdMap idmap = IdMap::standard;
  GraphContext context = GraphContext::history;
  std::size_t k = kDefaultHops;
  std::size_t cap = kDefaultNeighborCap;
  std::optional<double> threshold;  // empty: 95th percentile of training scores
  FpReductionConfig fp;
  std::string output_dir = "run";
  unsigned jobs = 1;

  void validate() const {
    if (scenario && (!train_traces.empty() || !test_traces.empty()))
      throw Error("config gives both a scenario and trace paths");
    if (!scenario && (train_traces.empty() || test_traces.empty()))
      throw Error("config needs a scenario or both train_traces and test_traces");
    if (scenario) scenario->validate();
    if (cap == 0) throw Error("cap must be >= 1");
    if (threshold && !(*threshold >= 0)) throw Error("threshold must be >= 0");
    if (fp.threshold < 1) throw Error("fp_reduction.threshold must be >= 1");
    if (fp.knn < 1) throw Error("fp_reduction.knn must be >= 1");
    if (jobs < 1) throw Error("jobs must be >= 1");
  }
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  if (c.scenario) j["scenario"] = to_json(*c.scenario);
  else {
    j["train_traces"] = c.train_traces;
    j["test_traces"] = c.test_traces;
  }
  j["idmap"] = to_string(c.idmap);
  j["context"] = to_string(c.context);
  j["k"] = c.k;
  if (c.cap == kUnlimitedCap) j["cap"] = "unlimited";
  else j["cap"] = c.cap;
  if (c.threshold) j["threshold"] = *c.threshold;
  else j["threshold"] = "auto";
  j["fp_reduction"] = {{"enabled", c.fp.enabled}, {"threshold", c.fp.threshold}, {"knn", c.fp.knn}, {"knn_mode", to_string(c.fp.mode)}};
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
  return j;
}

template <class Json>
RunConfig run_config_from_json(const Json& j) {
  static const std::set<std::string> known{"scenario", "train_traces", "test_traces", "idmap", "context", "k", "cap",
                                           "threshold", "fp_reduction", "output_dir", "jobs"};
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw Error("unknown config field '" + key + "'");
  RunConfig c;
  try {
    if (j.contains("scenario")) c.scenario = scenario_from_json(j["scenario"]);
    if (j.contains("train_traces")) c.train_traces = j["train_traces"].template get<std::vector<std::string>>();
    if (j.contains("test_traces")) c.test_traces = j["test_traces"].template get<std::vector<std::string>>();
    if (j.contains("idmap")) {
      const auto name = j["idmap"].template get<std::string>();
      const auto m = idmap_from_string(name);
      if (!m) throw Error("unknown idmap '" + name + "'");
      c.idmap = *m;
    }
    if (j.contains("context")) c.context = graph_context_from_string(j["context"].template get<std::string>());
    c.k = j.value("k", c.k);
    if (j.contains("cap")) {
      if (j["cap"].is_string()) {
        if (j["cap"].template get<std::string>() != "unlimited") throw Error("cap must be a number or \"unlimited\"");
        c.cap = kUnlimitedCap;
      } else {
        c.cap = j["cap"].template get<std::size_t>();
      }
    }
    if (j.contains("threshold")) {
      if (j["threshold"].is_string()) {
        if (j["threshold"].template get<std::string>() != "auto") throw Error("threshold must be a number or \"auto\"");
      } else {
        c.threshold = j["threshold"].template get<double>();
      }
    }
    if (j.contains("fp_reduction")) {
      const auto& f = j["fp_reduction"];
      for (const auto& [key, _] : f.items())
        if (key != "enabled" && key != "threshold" && key != "knn" && key != "knn_mode")
          throw Error("unknown fp_reduction field '" + key + "'");
      c.fp.enabled = f.value("enabled", c.fp.enabled);
      c.fp.threshold = f.value("threshold", c.fp.threshold);
      c.fp.knn = f.value("knn", c.fp.knn);
      if (f.contains("knn_mode")) c.fp.mode = knn_mode_from_string(f["knn_mode"].template get<std::string>());
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

/// Error raised by a pipeline stage; what() names the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "': " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
  std::size_t events = 0;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Runs `fn` as a named stage, recording its wall time and rewrapping errors.
template <class Fn>
auto stage(std::vector<StageTiming>& timings, const std::string& name, std::size_t events, Fn&& fn) {
  Stopwatch w;
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings.push_back({name, w.seconds(), events});
    } else {
      auto r = fn();
      timings.push_back({name, w.seconds(), events});
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct TraceSet {
  std::vector<Event> train;
  std::vector<std::string> day_names;
  std::vector<std::vector<Event>> test_days;
};

namespace detail {

inline std::vector<Event> concat_events(const std::vector<std::vector<Event>>& parts) {
  std::vector<Event> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].seq = i;
  return out;
}

}  // namespace detail

inline TraceSet traces_from_scenario(const Scenario& s) {
  TraceSet t;
  t.train = s.train_events();
  for (const auto& d : s.days) {
    if (!d.test) continue;
    t.day_names.push_back(day_file_name(d.day));
    t.test_days.push_back(d.events);
  }
  return t;
}

inline TraceSet traces_from_files(const std::vector<std::string>& train, const std::vector<std::string>& test) {
  TraceSet t;
  std::vector<std::vector<Event>> parts;
  for (const auto& p : train) parts.push_back(read_trace_file(p));
  t.train = detail::concat_events(parts);
  for (const auto& p : test) {
    t.day_names.push_back(std::filesystem::path(p).filename().string());
    t.test_days.push_back(read_trace_file(p));
  }
  return t;
}

/// A test graph plus the node indices to score.
struct TestGraph {
  ProvGraph graph;
  std::vector<std::uint32_t> nodes;
};

inline TestGraph test_graph(const std::vector<Event>& train, const std::vector<Event>& day, GraphContext context,
                            const UuidStrategy& strategy) {
  TestGraph t;
  if (context == GraphContext::isolated) {
    t.graph = build(day, strategy);
    t.nodes = all_nodes(t.graph);
    return t;
  }
  std::vector<Event> events;
  events.reserve(train.size() + day.size());
  events.insert(events.end(), train.begin(), train.end());
  events.insert(events.end(), day.begin(), day.end());
  for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = i;
  t.graph = build(events, strategy);
  std::vector<char> touched(t.graph.node_count(), 0);
  for (std::size_t e = train.size(); e < t.graph.edge_count(); ++e) {
    touched[t.graph.edges()[e].src] = 1;
    touched[t.graph.edges()[e].dst] = 1;
  }
  for (std::uint32_t v = 0; v < touched.size(); ++v)
    if (touched[v]) t.nodes.push_back(v);
  return t;
}

struct DayResult {
  std::string name;
  std::size_t events = 0;
  GraphStats stats;  // of the day's events alone
  std::size_t scored_nodes = 0;
  std::vector<Verdict> verdicts;
  EvalReport report;
  Confusion process_counts;
  std::optional<FpReductionResult> fp;
  std::optional<EvalReport> reduced;
  std::optional<Confusion> reduced_process_counts;
};

struct PipelineResult {
  GraphStats train_stats;
  DetectorModel model;
  double threshold = 0.0;
  std::vector<DayResult> days;
  EvalReport overall;
  std::optional<EvalReport> overall_reduced;
  std::vector<StageTiming> timings;
};

inline Confusion process_confusion(std::span<const Verdict> verdicts) {
  Confusion c;
  for (const auto& v : verdicts) {
    if (v.kind != EntityKind::process) continue;
    const bool p = v.predicted == Label::malicious, t = v.truth == Label::malicious;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

/// Train on `traces.train`, then detect (and optionally reduce false
/// positives) on each test day separately.
inline PipelineResult execute(const TraceSet& traces, const RunConfig& cfg) {
  PipelineResult r;
  const auto strategy = preset(cfg.idmap);
  const auto train_graph =
      stage(r.timings, "build_train", traces.train.size(), [&] { return build(traces.train, strategy); });
  r.train_stats = graph_stats(train_graph);
  r.model = stage(r.timings, "train", traces.train.size(), [&] { return train(train_graph, cfg.k, cfg.cap, cfg.jobs); });
  r.threshold = cfg.threshold.value_or(r.model.default_threshold);

  std::vector<Verdict> all, all_reduced;
  for (std::size_t d = 0; d < traces.test_days.size(); ++d) {
    const auto& events = traces.test_days[d];
    DayResult day;
    day.name = traces.day_names[d];
    day.events = events.size();
    const auto tg = stage(r.timings, "build_test", events.size(),
                          [&] { return test_graph(traces.train, events, cfg.context, strategy); });
    day.stats = graph_stats(build(events, strategy));
    day.scored_nodes = tg.nodes.size();
    day.verdicts = stage(r.timings, "detect", events.size(), [&] {
      return apply_threshold(score_nodes(r.model, tg.graph, tg.nodes, cfg.jobs), r.threshold);
    });
    day.report = stage(r.timings, "evaluate", events.size(), [&] { return evaluate(day.verdicts, r.threshold); });
    day.process_counts = process_confusion(day.verdicts);
    all.insert(all.end(), day.verdicts.begin(), day.verdicts.end());
    if (cfg.fp.enabled) {
      day.fp = stage(r.timings, "reduce_fp", events.size(), [&] {
        return reduce_false_positives(day.verdicts, events, {cfg.fp.threshold, cfg.fp.knn, cfg.jobs, cfg.fp.mode});
      });
      day.reduced = evaluate(day.fp->reduced, r.threshold, "provkit+fp_reduction");
      day.reduced_process_counts = process_confusion(day.fp->reduced);
      all_reduced.insert(all_reduced.end(), day.fp->reduced.begin(), day.fp->reduced.end());
    }
    r.days.push_back(std::move(day));
  }
  r.overall = evaluate(all, r.threshold);
  if (cfg.fp.enabled) r.overall_reduced = evaluate(all_reduced, r.threshold, "provkit+fp_reduction");
  return r;
}

inline nlohmann::ordered_json to_json(const GraphStats& s) {
  nlohmann::ordered_json j;
  j["nodes"] = s.node_count;
  j["edges"] = s.edge_count;
  j["entities"] = s.entity_count;
  nlohmann::ordered_json nk, ek;
  for (std::size_t i = 0; i < kEntityKindCount; ++i) {
    nk[std::string(kEntityKindNames[i])] = s.nodes_per_kind[i];
    ek[std::string(kEntityKindNames[i])] = s.entities_per_kind[i];
  }
  j["nodes_by_kind"] = std::move(nk);
  j["entities_by_kind"] = std::move(ek);
  j["malicious_nodes"] = s.malicious_nodes;
  j["malicious_edges"] = s.malicious_edges;
  return j;
}

inline nlohmann::ordered_json to_json(const Confusion& c) {
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"tpr", c.tpr()}, {"fpr", c.fpr()}};
}

/// report.json (reduced = false) or report_reduced.json (reduced = true).
/// Contains nothing that depends on wall time or on the output location.
inline nlohmann::ordered_json report_json(const PipelineResult& r, const RunConfig& cfg, bool reduced) {
  nlohmann::ordered_json j;
  j["idmap"] = to_string(cfg.idmap);
  j["context"] = to_string(cfg.context);
  j["k"] = cfg.k;
  j["cap"] = cfg.cap == kUnlimitedCap ? nlohmann::ordered_json("unlimited") : nlohmann::ordered_json(cfg.cap);
  j["threshold"] = r.threshold;
  j["threshold_source"] = cfg.threshold ? "config" : "train_p95";
  j["train_graph"] = to_json(r.train_stats);
  j["overall"] = to_json(reduced ? *r.overall_reduced : r.overall);
  auto& days = j["days"] = nlohmann::ordered_json::array();
  std::vector<double> fprs;
  for (const auto& d : r.days) {
    nlohmann::ordered_json dj;
    dj["name"] = d.name;
    dj["events"] = d.events;
    dj["graph"] = to_json(d.stats);
    dj["scored_nodes"] = d.scored_nodes;
    const auto& rep = reduced ? *d.reduced : d.report;
    auto rj = to_json(rep);
    rj.erase("roc");
    dj["report"] = std::move(rj);
    dj["process_level"] = to_json(reduced ? *d.reduced_process_counts : d.process_counts);
    if (reduced) {
      dj["alerted_processes"] = d.fp->assignments.size();
      dj["communities"] = d.fp->flags.community_count;
      dj["flagged_processes"] = d.fp->flags.fp_processes.size();
      auto& cs = dj["community_sizes"] = nlohmann::ordered_json::array();
      for (const auto& c : d.fp->communities) cs.push_back(c.size());
    }
    fprs.push_back(rep.fpr);
    days.push_back(std::move(dj));
  }
  const auto trend = fpr_trend(fprs);
  j["fpr_series"] = trend.fpr;
  j["fpr_slope"] = trend.slope;
  j["fpr_trend_nondecreasing"] = trend.trend_nondecreasing;
  return j;
}

inline std::string verdicts_csv_header() { return "day,uuid,entity,kind,score,predicted,truth"; }

inline std::string verdict_csv_row(std::string_view day, const Verdict& v) {
  char score[40];
  std::snprintf(score, sizeof score, "%.17g", v.score);
  std::string row;
  row += csv::field(day);
  row += ',';
  row += hex64(v.uuid);
  row += ',';
  row += csv::field(v.entity.str());
  row += ',';
  row += to_string(v.kind);
  row += ',';
  row += score;
  row += ',';
  row += to_string(v.predicted);
  row += ',';
  row += to_string(v.truth);
  return row;
}

struct DayVerdicts {
  std::string day;
  std::vector<Verdict> verdicts;
};

/// Reads a verdicts.csv written by write_verdicts_csv, grouped by day in file
/// order.
inline std::vector<DayVerdicts> read_verdicts_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != verdicts_csv_header())
    throw Error(path.string() + ": expected header '" + verdicts_csv_header() + "'");
  std::vector<DayVerdicts> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 7) throw ParseError(n, "expected 7 fields, got " + std::to_string(f.size()));
    Verdict v;
    try {
      v.uuid = std::stoull(f[1], nullptr, 16);
      v.score = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError(n, "bad uuid or score");
    }
    v.entity = Symbol(f[2]);
    const auto kind = entity_kind_from_string(f[3]);
    const auto pred = label_from_string(f[5]);
    const auto truth = label_from_string(f[6]);
    if (!kind || !pred || !truth) throw ParseError(n, "bad kind or label");
    v.kind = *kind;
    v.predicted = *pred;
    v.truth = *truth;
    if (out.empty() || out.back().day != f[0]) out.push_back({f[0], {}});
    out.back().verdicts.push_back(v);
  }
  return out;
}

inline void write_verdicts_csv(const std::filesystem::path& path, const std::vector<DayVerdicts>& days) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << verdicts_csv_header() << '\n';
  for (const auto& d : days)
    for (const auto& v : d.verdicts) out << verdict_csv_row(d.day, v) << '\n';
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

inline std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

}  // namespace detail

inline std::string timing_csv(const std::vector<StageTiming>& timings) {
  std::string out = "stage,seconds,events\n";
  char buf[128];
  for (const auto& t : timings) {
    std::snprintf(buf, sizeof buf, ",%.6f,%zu\n", t.seconds, t.events);
    out += t.stage + buf;
  }
  return out;
}

/// Output root used when a relative output_dir is given: $PROVKIT_OUT_ROOT,
/// or the current directory.
inline std::filesystem::path output_root() {
  if (const char* env = std::getenv("PROVKIT_OUT_ROOT"); env && *env) return env;
  return ".";
}

inline std::filesystem::path resolve_output(const std::string& dir) {
  std::filesystem::path p(dir);
  return p.is_absolute() ? p : output_root() / p;
}

/// Runs the whole pipeline and writes the run directory:
///   config.json, traces/, graphs/, verdicts.csv, report.json,
///   report_reduced.json (when FP reduction is on), timing.csv, manifest.json
inline PipelineResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir = resolve_output(cfg.output_dir);
  std::vector<StageTiming> timings;
  stage(timings, "prepare", 0, [&] {
    fs::create_directories(dir / "traces");
    fs::create_directories(dir / "graphs");
    detail::write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
  });

  TraceSet traces;
  if (cfg.scenario) {
    const auto scenario = stage(timings, "generate", 0, [&] { return generate(*cfg.scenario); });
    stage(timings, "write_traces", 0, [&] { write_scenario(scenario, dir / "traces"); });
    traces = traces_from_scenario(scenario);
  } else {
    traces = stage(timings, "parse", 0, [&] { return traces_from_files(cfg.train_traces, cfg.test_traces); });
  }

  auto result = execute(traces, cfg);
  result.timings.insert(result.timings.begin(), timings.begin(), timings.end());

  stage(result.timings, "write_outputs", 0, [&] {
    nlohmann::ordered_json graphs;
    graphs["train"] = to_json(result.train_stats);
    for (const auto& d : result.days) graphs["test"][d.name] = to_json(d.stats);
    detail::write_text(dir / "graphs" / "stats.json", graphs.dump(2) + "\n");

    std::vector<DayVerdicts> dv;
    for (const auto& d : result.days) dv.push_back({d.name, d.verdicts});
    write_verdicts_csv(dir / "verdicts.csv", dv);
    detail::write_text(dir / "report.json", report_json(result, cfg, false).dump(2) + "\n");
    if (cfg.fp.enabled) {
      std::vector<DayVerdicts> rv;
      for (const auto& d : result.days) rv.push_back({d.name, d.fp->reduced});
      write_verdicts_csv(dir / "verdicts_reduced.csv", rv);
      detail::write_text(dir / "report_reduced.json", report_json(result, cfg, true).dump(2) + "\n");
    }
  });
  detail::write_text(dir / "timing.csv", timing_csv(result.timings));

  nlohmann::ordered_json m;
  m["provkit_version"] = kVersion;
  m["catalog_version"] = default_catalog().version;
  if (cfg.scenario) m["seed"] = cfg.scenario->seed;
  auto& sums = m["checksums"];
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto rel = fs::relative(f, dir).generic_string();
    if (rel == "manifest.json" || rel == "timing.csv") continue;
    sums[rel] = hex64(detail::file_checksum(f));
  }
  detail::write_text(dir / "manifest.json", m.dump(2) + "\n");
  return result;
}

struct SweepRow {
  IdMap idmap = IdMap::standard;
  std::size_t node_count = 0;  // train + test
  std::size_t edge_count = 0;
  std::optional<double> auc;
  double train_time = 0.0;
  double test_time = 0.0;
};

/// Re-runs training and scoring under each of the six uuid presets. Test
/// days are pooled into one day. node_count is training nodes plus scored
/// test nodes; edge_count is training plus test edges.
inline std::vector<SweepRow> sweep_idmap(const TraceSet& traces, const RunConfig& cfg) {
  std::vector<Event> test;
  for (const auto& d : traces.test_days) test.insert(test.end(), d.begin(), d.end());
  for (std::size_t i = 0; i < test.size(); ++i) test[i].seq = i;
  std::vector<SweepRow> rows;
  for (const auto m : kAllIdMaps) {
    SweepRow row;
    row.idmap = m;
    Stopwatch w;
    const auto train_graph = build(traces.train, preset(m));
    const auto model = train(train_graph, cfg.k, cfg.cap, cfg.jobs);
    row.train_time = w.seconds();
    Stopwatch w2;
    const auto tg = test_graph(traces.train, test, cfg.context, preset(m));
    const auto verdicts = apply_threshold(score_nodes(model, tg.graph, tg.nodes, cfg.jobs),
                                          cfg.threshold.value_or(model.default_threshold));
    row.test_time = w2.seconds();
    row.node_count = train_graph.node_count() + tg.nodes.size();
    row.edge_count = train_graph.edge_count() + test.size();
    row.auc = evaluate(verdicts, 0.0).auc;
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "idmap,node_count,edge_count,auc,train_time,test_time\n";
  char buf[160];
  for (const auto& r : rows) {
    char auc_text[32] = "NA";
    if (r.auc) std::snprintf(auc_text, sizeof auc_text, "%.6f", *r.auc);
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%s,%.3f,%.3f\n", std::string(to_string(r.idmap)).c_str(), r.node_count,
                  r.edge_count, auc_text, r.train_time, r.test_time);
    out += buf;
  }
  return out;
}

}  // namespace provkit
