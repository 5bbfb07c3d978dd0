// provkit command line: trace generation, graph building, detection, FP
// reduction, evaluation and full pipeline runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "provkit/provkit.hpp"

namespace fs = std::filesystem;
using namespace provkit;

namespace {

// Options shared by the subcommands that train a detector.
struct DetectOptions {
  std::string idmap = "default";
  std::size_t k = kDefaultHops;
  std::string cap = "100";
  std::string threshold = "auto";
  std::string context = "history";
  unsigned jobs = 1;
};

void add_detect_options(CLI::App* cmd, DetectOptions& o) {
  cmd->add_option("--idmap", o.idmap, "uuid strategy: default, 1..5")->capture_default_str();
  cmd->add_option("--k", o.k, "neighbourhood hops")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--cap", o.cap, "neighbour cap per hop, or 'unlimited'")->capture_default_str();
  cmd->add_option("--threshold", o.threshold, "'auto' or a score")->capture_default_str();
  cmd->add_option("--context", o.context, "history or isolated")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker threads (0: all cores)")->capture_default_str();
}

IdMap parse_idmap(const std::string& s) {
  const auto m = idmap_from_string(s);
  if (!m) throw Error("unknown idmap '" + s + "' (expected default or 1..5)");
  return *m;
}

std::size_t parse_cap(const std::string& s) {
  if (s == "unlimited") return kUnlimitedCap;
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size() || v == 0) throw Error("cap must be a positive integer or 'unlimited'");
  return v;
}

std::optional<double> parse_threshold(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(v >= 0)) throw Error("threshold must be 'auto' or a number >= 0");
  return v;
}

unsigned resolve_jobs(unsigned j) { return j ? j : std::max(1u, std::thread::hardware_concurrency()); }

void apply(const DetectOptions& o, RunConfig& c) {
  c.idmap = parse_idmap(o.idmap);
  c.k = o.k;
  c.cap = parse_cap(o.cap);
  c.threshold = parse_threshold(o.threshold);
  c.context = graph_context_from_string(o.context);
  c.jobs = resolve_jobs(o.jobs);
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

void print_report(const std::string& name, const EvalReport& r) {
  std::printf("%-16s %s\n", name.c_str(), summary_csv_row(r).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"provkit: provenance-graph intrusion detection toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // gen-traces
  auto* gen = app.add_subcommand("gen-traces", "generate a seeded synthetic scenario");
  std::string gen_preset = "default", gen_config, gen_out = "traces";
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--preset", gen_preset, "default, mining, ever_changing or quiet")->capture_default_str();
  gen->add_option("--config", gen_config, "scenario JSON (overrides --preset)");
  gen->add_option("--seed", gen_seed, "override the seed");
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();

  // build-graph
  auto* bg = app.add_subcommand("build-graph", "build a provenance graph and export it as CSV");
  std::vector<std::string> bg_traces;
  std::string bg_idmap = "default", bg_out, bg_features, bg_cap = "100";
  std::size_t bg_k = kDefaultHops;
  bg->add_option("--trace", bg_traces, "trace file(s), concatenated in order")->required();
  bg->add_option("--idmap", bg_idmap, "uuid strategy")->capture_default_str();
  bg->add_option("--out", bg_out, "directory for nodes.csv, edges.csv, stats.json");
  bg->add_option("--features", bg_features, "write per-node type-tuple counts to this CSV");
  bg->add_option("--k", bg_k, "neighbourhood hops for --features")->capture_default_str()->check(CLI::PositiveNumber);
  bg->add_option("--cap", bg_cap, "neighbour cap for --features, or 'unlimited'")->capture_default_str();

  // detect
  auto* det = app.add_subcommand("detect", "train on benign traces and score test traces");
  std::vector<std::string> det_train, det_test;
  std::string det_out = "verdicts.csv";
  DetectOptions det_opt;
  det->add_option("--train", det_train, "training trace file(s)")->required();
  det->add_option("--test", det_test, "test trace file(s), one per day")->required();
  det->add_option("--out", det_out, "verdict CSV")->capture_default_str();
  add_detect_options(det, det_opt);

  // reduce-fp
  auto* rfp = app.add_subcommand("reduce-fp", "cluster alerted processes and flag large communities");
  std::string rfp_alerts, rfp_trace, rfp_day, rfp_out, rfp_mode = "mutual", rfp_reduced;
  std::size_t rfp_threshold = kDefaultCommunitySizeThreshold, rfp_knn = kDefaultKnn;
  rfp->add_option("--alerts", rfp_alerts, "verdict CSV from detect")->required();
  rfp->add_option("--trace", rfp_trace, "the test day's trace")->required();
  rfp->add_option("--day", rfp_day, "day name in the verdict CSV (default: the trace's file name)");
  rfp->add_option("--threshold", rfp_threshold, "community size threshold")->capture_default_str();
  rfp->add_option("--knn", rfp_knn, "neighbours in the similarity graph")->capture_default_str();
  rfp->add_option("--knn-mode", rfp_mode, "mutual or union")->capture_default_str();
  rfp->add_option("--out", rfp_out, "community CSV (default: stdout)");
  rfp->add_option("--reduced", rfp_reduced, "write the reduced verdicts here");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "summarise a verdict CSV");
  std::string ev_verdicts, ev_json;
  ev->add_option("--verdicts", ev_verdicts, "verdict CSV")->required();
  ev->add_option("--json", ev_json, "also write the full reports as JSON");

  // analyze-distance
  auto* ad = app.add_subcommand("analyze-distance", "malicious/benign nearest-train distance ratio");
  std::vector<std::string> ad_train, ad_test;
  std::string ad_agg = "mean";
  std::optional<std::size_t> ad_drop;
  DetectOptions ad_opt;
  ad->add_option("--train", ad_train, "training trace file(s)")->required();
  ad->add_option("--test", ad_test, "labelled test trace(s); three or more also give a correlation")->required();
  ad->add_option("--aggregate", ad_agg, "mean or median")->capture_default_str();
  ad->add_option("--drop-outlier", ad_drop, "leave this test (0-based) out of the correlation");
  add_detect_options(ad, ad_opt);

  // sweep-idmap
  auto* sw = app.add_subcommand("sweep-idmap", "AUC and graph size under the six uuid presets");
  std::string sw_config, sw_preset = "default", sw_out;
  std::optional<std::uint64_t> sw_seed;
  DetectOptions sw_opt;
  sw->add_option("--config", sw_config, "run config JSON");
  sw->add_option("--preset", sw_preset, "scenario preset when no config is given")->capture_default_str();
  sw->add_option("--seed", sw_seed, "override the scenario seed");
  sw->add_option("--out", sw_out, "CSV output (default: stdout)");
  add_detect_options(sw, sw_opt);

  // run
  auto* run = app.add_subcommand("run", "run the whole pipeline into a run directory");
  std::string run_config, run_preset, run_replay, run_out;
  std::optional<std::uint64_t> run_seed;
  std::optional<unsigned> run_jobs;
  bool run_no_fp = false;
  run->add_option("--config", run_config, "run config JSON");
  run->add_option("--preset", run_preset, "scenario preset, with default detector settings");
  run->add_option("--replay", run_replay, "re-run the config saved in a run directory");
  run->add_option("--seed", run_seed, "override the scenario seed");
  run->add_option("--out", run_out, "run directory (relative paths resolve under $PROVKIT_OUT_ROOT)");
  run->add_option("--jobs", run_jobs, "worker threads (0: all cores)");
  run->add_flag("--no-fp-reduction", run_no_fp, "skip FP reduction");

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (*gen) {
      auto spec = gen_config.empty() ? scenario_preset(gen_preset) : load_scenario(gen_config);
      if (gen_seed) spec.seed = *gen_seed;
      std::vector<StageTiming> t;
      const auto s = stage(t, "generate", 0, [&] { return generate(spec); });
      stage(t, "write_traces", 0, [&] { write_scenario(s, gen_out); });
      std::size_t events = 0, malicious = 0;
      for (const auto& d : s.days)
        for (const auto& e : d.events) {
          ++events;
          malicious += e.label == Label::malicious;
        }
      std::printf("wrote %zu days, %zu events (%zu malicious) to %s\n", s.days.size(), events, malicious,
                  gen_out.c_str());
    } else if (*bg) {
      std::vector<StageTiming> t;
      std::vector<Event> events;
      stage(t, "parse", 0, [&] {
        std::vector<std::vector<Event>> parts;
        for (const auto& p : bg_traces) parts.push_back(read_trace_file(p));
        events = detail::concat_events(parts);
      });
      const auto g = stage(t, "build_graph", events.size(), [&] { return build(events, preset(parse_idmap(bg_idmap))); });
      const auto stats = to_json(graph_stats(g)).dump(2);
      if (!bg_out.empty()) {
        stage(t, "write_graph", events.size(), [&] {
          export_csv(g, bg_out);
          write_file(fs::path(bg_out) / "stats.json", stats + "\n");
        });
      }
      if (!bg_features.empty()) {
        stage(t, "features", events.size(), [&] {
          const auto universe = TupleUniverse::from_graphs({&g});
          const auto vecs = node_vectors(g, universe, bg_k, parse_cap(bg_cap));
          std::ofstream out(bg_features, std::ios::binary);
          if (!out) throw Error("cannot write " + bg_features);
          write_features_csv(out, g, universe, vecs);
        });
      }
      std::printf("%s\n", stats.c_str());
    } else if (*det) {
      RunConfig c;
      apply(det_opt, c);
      c.fp.enabled = false;
      std::vector<StageTiming> t;
      const auto traces = stage(t, "parse", 0, [&] { return traces_from_files(det_train, det_test); });
      const auto r = execute(traces, c);
      std::vector<DayVerdicts> dv;
      for (const auto& d : r.days) dv.push_back({d.name, d.verdicts});
      write_verdicts_csv(det_out, dv);
      std::printf("threshold %.6g (%s)\n", r.threshold, c.threshold ? "given" : "train p95");
      for (const auto& d : r.days) print_report(d.name, d.report);
    } else if (*rfp) {
      std::vector<StageTiming> t;
      const auto days = stage(t, "parse", 0, [&] { return read_verdicts_csv(rfp_alerts); });
      const auto events = stage(t, "parse", 0, [&] { return read_trace_file(rfp_trace); });
      const std::string want = rfp_day.empty() ? fs::path(rfp_trace).filename().string() : rfp_day;
      const DayVerdicts* day = nullptr;
      for (const auto& d : days)
        if (d.day == want) day = &d;
      if (!day && rfp_day.empty() && days.size() == 1) day = &days.front();
      if (!day) throw Error("no verdicts for day '" + want + "' in " + rfp_alerts);
      const auto r = stage(t, "reduce_fp", events.size(), [&] {
        return reduce_false_positives(day->verdicts, events,
                                      {rfp_threshold, rfp_knn, 1, knn_mode_from_string(rfp_mode)});
      });
      std::string out = "process_key,community_id,community_size,flagged,representative\n";
      for (const auto& a : r.assignments)
        out += csv::field(a.process_key.str()) + ',' + std::to_string(a.community_id) + ',' +
               std::to_string(a.community_size) + ',' + (a.flagged ? "true" : "false") + ',' +
               csv::field(a.representative.str()) + '\n';
      if (rfp_out.empty()) std::fputs(out.c_str(), stdout);
      else write_file(rfp_out, out);
      if (!rfp_reduced.empty()) write_verdicts_csv(rfp_reduced, {{day->day, r.reduced}});
      std::fprintf(stderr, "%zu alerted processes, %zu communities, %zu flagged\n", r.assignments.size(),
                   r.flags.community_count, r.flags.fp_processes.size());
    } else if (*ev) {
      std::vector<StageTiming> t;
      const auto days = stage(t, "parse", 0, [&] { return read_verdicts_csv(ev_verdicts); });
      std::printf("%-16s %s\n", "day", summary_csv_header().c_str());
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      std::vector<Verdict> all;
      for (const auto& d : days) {
        const auto r = evaluate(d.verdicts, 0.0);
        print_report(d.day, r);
        j[d.day] = to_json(r);
        all.insert(all.end(), d.verdicts.begin(), d.verdicts.end());
      }
      const auto overall = evaluate(all, 0.0);
      print_report("overall", overall);
      j["overall"] = to_json(overall);
      if (!ev_json.empty()) write_file(ev_json, j.dump(2) + "\n");
    } else if (*ad) {
      RunConfig c;
      apply(ad_opt, c);
      c.fp.enabled = false;
      if (ad_agg != "mean" && ad_agg != "median") throw Error("aggregate must be mean or median");
      const auto how = ad_agg == "median" ? Aggregate::median : Aggregate::mean;
      std::vector<StageTiming> t;
      const auto traces = stage(t, "parse", 0, [&] { return traces_from_files(ad_train, ad_test); });
      const auto r = execute(traces, c);
      nlohmann::ordered_json j;
      auto rows = nlohmann::ordered_json::array();
      std::vector<double> ratios, aucs;
      for (const auto& d : r.days) {
        std::vector<double> mal, ben;
        for (const auto& v : d.verdicts) (v.truth == Label::malicious ? mal : ben).push_back(v.score);
        nlohmann::ordered_json row;
        row["test"] = d.name;
        if (mal.empty() || ben.empty()) {
          row["skipped"] = mal.empty() ? "no malicious nodes" : "no benign nodes";
          rows.push_back(std::move(row));
          continue;
        }
        const auto dr = stage(t, "analyze_distance", d.events, [&] { return distance_ratio(mal, ben, how); });
        row["ratio"] = dr.ratio;
        row["malicious_distance"] = dr.mean_malicious;
        row["benign_distance"] = dr.mean_benign;
        row["malicious_nodes"] = dr.malicious_nodes;
        row["benign_nodes"] = dr.benign_nodes;
        row["degenerate"] = dr.degenerate;
        row["auc"] = d.report.auc ? nlohmann::ordered_json(*d.report.auc) : nlohmann::ordered_json(nullptr);
        if (dr.degenerate) std::fprintf(stderr, "warning: %s: zero benign distance, ratio guarded\n", d.name.c_str());
        if (d.report.auc && (!ad_drop || *ad_drop != rows.size())) {
          ratios.push_back(dr.ratio);
          aucs.push_back(*d.report.auc);
        }
        rows.push_back(std::move(row));
      }
      j["tests"] = std::move(rows);
      j["aggregate"] = ad_agg;
      if (ad_drop && *ad_drop >= r.days.size()) throw Error("--drop-outlier index out of range");
      if (ratios.size() >= 3) {
        const auto corr = stage(t, "correlate", 0, [&] { return pearson(ratios, aucs); });
        j["pearson_r"] = corr.r;
        j["p_value"] = corr.p_value;
        j["n"] = corr.n;
      }
      std::printf("%s\n", j.dump(2).c_str());
    } else if (*sw) {
      RunConfig c;
      if (!sw_config.empty()) {
        c = load_run_config(sw_config);
      } else {
        c.scenario = scenario_preset(sw_preset);
        apply(sw_opt, c);
      }
      if (sw_seed && c.scenario) c.scenario->seed = *sw_seed;
      std::vector<StageTiming> t;
      const auto traces = stage(t, "generate", 0, [&] {
        return c.scenario ? traces_from_scenario(generate(*c.scenario)) : traces_from_files(c.train_traces, c.test_traces);
      });
      const auto rows = stage(t, "sweep_idmap", traces.train.size(), [&] { return sweep_idmap(traces, c); });
      const auto out = sweep_csv(rows);
      if (sw_out.empty()) std::fputs(out.c_str(), stdout);
      else write_file(sw_out, out);
    } else if (*run) {
      const int sources = !run_config.empty() + !run_preset.empty() + !run_replay.empty();
      if (sources != 1) throw Error("give exactly one of --config, --preset, --replay");
      RunConfig c;
      if (!run_config.empty()) c = load_run_config(run_config);
      else if (!run_replay.empty()) c = load_run_config(fs::path(run_replay) / "config.json");
      else c.scenario = scenario_preset(run_preset);
      if (run_seed) {
        if (!c.scenario) throw Error("--seed needs a scenario config");
        c.scenario->seed = *run_seed;
      }
      if (run_jobs) c.jobs = resolve_jobs(*run_jobs);
      if (run_no_fp) c.fp.enabled = false;
      if (!run_out.empty()) c.output_dir = run_out;
      else if (!run_replay.empty()) c.output_dir = run_replay + "-replay";
      const auto r = run_pipeline(c);
      std::printf("run directory: %s\n", resolve_output(c.output_dir).string().c_str());
      std::printf("%-16s %s\n", "day", summary_csv_header().c_str());
      for (const auto& d : r.days) {
        print_report(d.name, d.report);
        if (d.reduced) print_report("  +fp_reduction", *d.reduced);
      }
      print_report("overall", r.overall);
      if (r.overall_reduced) print_report("  +fp_reduction", *r.overall_reduced);
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "provkit %s: %s\n", cmd.c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "provkit %s: stage '%s': %s\n", cmd.c_str(), cmd.c_str(), e.what());
    return 1;
  }
  return 0;
}
