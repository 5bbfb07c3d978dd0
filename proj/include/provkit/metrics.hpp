#pragma once

#include <concepts>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "provkit/detector.hpp"

namespace provkit {

struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  double tpr() const noexcept { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
  double fpr() const noexcept { return fp + tn ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0; }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

inline Confusion confusion(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw Error("confusion: no verdicts");
  Confusion c;
  for (const auto& v : verdicts) {
    const bool pred = v.predicted == Label::malicious;
    const bool truth = v.truth == Label::malicious;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline Confusion confusion(const std::vector<Verdict>& v) { return confusion(std::span<const Verdict>(v)); }

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

/// Area under the ROC curve as the Mann-Whitney statistic
/// P(pos > neg) + P(pos == neg) / 2, via one sorted sweep.
inline double auc(std::span<const ScoredLabel> xs) {
  std::vector<ScoredLabel> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  double pos_total = 0, neg_total = 0, wins = 0, neg_below = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    double p = 0, n = 0;
    while (j < s.size() && s[j].score == s[i].score) {
      (s[j].positive ? p : n) += 1;
      ++j;
    }
    wins += p * (neg_below + 0.5 * n);
    neg_below += n;
    pos_total += p;
    neg_total += n;
    i = j;
  }
  if (pos_total == 0 || neg_total == 0) throw Error("auc: need at least one positive and one negative");
  return wins / (pos_total * neg_total);
}

inline double auc(const std::vector<ScoredLabel>& xs) { return auc(std::span<const ScoredLabel>(xs)); }

/// ROC points (fpr, tpr) from the strictest threshold down, starting at (0,0).
inline std::vector<std::pair<double, double>> roc_curve(std::span<const ScoredLabel> xs) {
  std::vector<ScoredLabel> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  double P = 0, N = 0;
  for (const auto& x : s) (x.positive ? P : N) += 1;
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j].score == s[i].score) {
      (s[j].positive ? tp : fp) += 1;
      ++j;
    }
    pts.emplace_back(N > 0 ? fp / N : 0.0, P > 0 ? tp / P : 0.0);
    i = j;
  }
  return pts;
}

enum class PValueMethod : std::uint8_t { t_distribution, permutation };

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

namespace detail {

inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

/// Sample Pearson correlation with a two-sided p-value. The t-distribution
/// route uses n-2 degrees of freedom; the permutation route enumerates all
/// n! pairings and is limited to n < 10.
inline Correlation pearson(std::span<const double> xs, std::span<const double> ys,
                           PValueMethod method = PValueMethod::t_distribution) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  if (xs.size() < 3) throw Error("pearson: need at least 3 points");
  Correlation c;
  c.n = xs.size();
  c.r = detail::pearson_r(xs, ys);

  if (method == PValueMethod::t_distribution) {
    const double df = static_cast<double>(c.n - 2);
    if (std::abs(c.r) >= 1.0) {
      c.p_value = 0.0;
    } else {
      const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
      boost::math::students_t dist(df);
      c.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
  } else {
    if (c.n >= 10) throw Error("pearson: permutation p-value is only offered for n < 10");
    std::vector<std::size_t> perm(c.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> permuted(c.n);
    std::size_t extreme = 0, total = 0;
    const double observed = std::abs(c.r) - 1e-12;
    do {
      for (std::size_t i = 0; i < c.n; ++i) permuted[i] = ys[perm[i]];
      if (std::abs(detail::pearson_r(xs, permuted)) >= observed) ++extreme;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    c.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  }
  return c;
}

inline Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys,
                           PValueMethod method = PValueMethod::t_distribution) {
  return pearson(std::span<const double>(xs), std::span<const double>(ys), method);
}

struct EntityCounts {
  std::size_t tp_entity = 0;
  std::size_t fp_entity = 0;
  double expansion_ratio = 0.0;  // tp / tp_entity; +inf when tp_entity == 0
};

/// Distinct entities among true-positive and false-positive nodes.
/// `entity_of` maps node uuid to entity key and must cover every verdict.
template <std::invocable<std::uint64_t> EntityLookup>
EntityCounts entity_dedup(std::span<const Verdict> verdicts, EntityLookup&& entity_of) {
  std::unordered_set<Symbol> tp, fp;
  std::size_t tp_nodes = 0;
  for (const auto& v : verdicts) {
    if (v.predicted != Label::malicious) continue;
    const std::optional<Symbol> e = entity_of(v.uuid);
    if (!e) throw Error("entity_dedup: no entity for node " + hex64(v.uuid));
    if (v.truth == Label::malicious) {
      tp.insert(*e);
      ++tp_nodes;
    } else {
      fp.insert(*e);
    }
  }
  EntityCounts c;
  c.tp_entity = tp.size();
  c.fp_entity = fp.size();
  c.expansion_ratio = c.tp_entity == 0 ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(tp_nodes) / static_cast<double>(c.tp_entity);
  return c;
}

inline EntityCounts entity_dedup(std::span<const Verdict> verdicts,
                                 const std::unordered_map<std::uint64_t, Symbol>& entity_of) {
  return entity_dedup(verdicts, [&](std::uint64_t uuid) -> std::optional<Symbol> {
    if (auto it = entity_of.find(uuid); it != entity_of.end()) return it->second;
    return std::nullopt;
  });
}

inline EntityCounts entity_dedup(std::span<const Verdict> verdicts, const ProvGraph& g) {
  return entity_dedup(verdicts, [&](std::uint64_t uuid) -> std::optional<Symbol> {
    if (auto idx = g.index_of(uuid)) return g.nodes()[*idx].entity;
    return std::nullopt;
  });
}

/// Full evaluation of one set of verdicts.
struct EvalReport {
  std::string method = "provkit";
  Confusion counts;
  double tpr = 0.0;
  double fpr = 0.0;
  std::optional<double> auc;  // undefined without both classes
  std::size_t tp_entity = 0;
  std::size_t fp_entity = 0;
  double expansion_ratio = 0.0;
  double threshold = 0.0;
  std::vector<std::pair<double, double>> roc;
};

inline std::vector<ScoredLabel> scored_labels(std::span<const Verdict> verdicts) {
  std::vector<ScoredLabel> s;
  s.reserve(verdicts.size());
  for (const auto& v : verdicts) s.push_back({v.score, v.truth == Label::malicious});
  return s;
}

inline EvalReport evaluate(std::span<const Verdict> verdicts, double threshold, std::string method = "provkit") {
  EvalReport r;
  r.method = std::move(method);
  r.threshold = threshold;
  r.counts = confusion(verdicts);
  r.tpr = r.counts.tpr();
  r.fpr = r.counts.fpr();
  const auto labels = scored_labels(verdicts);
  if (r.counts.tp + r.counts.fn > 0 && r.counts.tn + r.counts.fp > 0) {
    r.auc = auc(labels);
    r.roc = roc_curve(labels);
  }
  std::unordered_set<Symbol> tp, fp;
  for (const auto& v : verdicts) {
    if (v.predicted != Label::malicious) continue;
    (v.truth == Label::malicious ? tp : fp).insert(v.entity);
  }
  r.tp_entity = tp.size();
  r.fp_entity = fp.size();
  r.expansion_ratio = r.tp_entity ? static_cast<double>(r.counts.tp) / static_cast<double>(r.tp_entity)
                                  : std::numeric_limits<double>::infinity();
  return r;
}

inline EvalReport evaluate(const std::vector<Verdict>& v, double threshold, std::string method = "provkit") {
  return evaluate(std::span<const Verdict>(v), threshold, std::move(method));
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  const auto num = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["threshold"] = r.threshold;
  j["tp"] = r.counts.tp;
  j["tn"] = r.counts.tn;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["tpr"] = r.tpr;
  j["fpr"] = r.fpr;
  j["auc"] = r.auc ? num(*r.auc) : nlohmann::ordered_json(nullptr);
  j["tp_entity"] = r.tp_entity;
  j["fp_entity"] = r.fp_entity;
  j["expansion_ratio"] = num(r.expansion_ratio);
  auto roc = nlohmann::ordered_json::array();
  for (const auto& [f, t] : r.roc) roc.push_back({f, t});
  j["roc"] = std::move(roc);
  return j;
}

inline std::string summary_csv_header() { return "Method,TPR,FPR,AUC,TP,TN,FN,FP"; }

/// One row in the layout of the detection-result tables.
inline std::string summary_csv_row(const EvalReport& r) {
  char auc_text[32] = "NA";
  if (r.auc) std::snprintf(auc_text, sizeof auc_text, "%.4f", *r.auc);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%s,%zu,%zu,%zu,%zu", r.method.c_str(), r.tpr, r.fpr, auc_text,
                r.counts.tp, r.counts.tn, r.counts.fn, r.counts.fp);
  return buf;
}

struct FprSeries {
  std::vector<double> fpr;
  double slope = 0.0;              // least-squares slope of fpr over day index
  bool trend_nondecreasing = true;  // slope >= 0
};

/// Least-squares trend of a per-day FPR series.
inline FprSeries fpr_trend(std::vector<double> fprs) {
  FprSeries s;
  s.fpr = std::move(fprs);
  const std::size_t n = s.fpr.size();
  if (n >= 2) {
    const double mx = static_cast<double>(n - 1) / 2.0;
    const double my = std::accumulate(s.fpr.begin(), s.fpr.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (static_cast<double>(i) - mx) * (s.fpr[i] - my);
      sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
    }
    s.slope = sxy / sxx;
  }
  s.trend_nondecreasing = s.slope >= -1e-12;
  return s;
}

/// Per-day FPR of a trained model at a fixed threshold. Each day is built
/// into its own graph with `strategy`.
inline FprSeries fpr_series(const DetectorModel& model, std::span<const std::vector<Event>> days, double threshold,
                            const UuidStrategy& strategy, unsigned jobs = 1) {
  std::vector<double> fprs;
  for (const auto& day : days) {
    const auto g = build(day, strategy);
    const auto verdicts = apply_threshold(score_all(model, g, jobs), threshold);
    fprs.push_back(confusion(verdicts).fpr());
  }
  return fpr_trend(std::move(fprs));
}

}  // namespace provkit
