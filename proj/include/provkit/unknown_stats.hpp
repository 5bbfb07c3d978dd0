#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "provkit/event.hpp"
#include "provkit/uuid.hpp"

namespace provkit {

struct ProcessUnknownRatio {
  Symbol process_path;
  std::size_t test_events = 0;
  std::size_t unknown_events = 0;
  double ratio = 0.0;
};

struct UnknownBehaviorStats {
  std::vector<ProcessUnknownRatio> per_process;  // sorted by path
  /// Empirical CDF over processes: (ratio, fraction of processes <= ratio),
  /// one point per distinct ratio.
  std::vector<std::pair<double, double>> cdf;
};

/// For every process image path in `test`, the fraction of its test events
/// whose (action, object identity) pair never occurs for that path in `train`.
/// Object identity is the node uuid under `strategy`.
inline UnknownBehaviorStats unknown_behavior_stats(std::span<const Event> train, std::span<const Event> test,
                                                   const UuidStrategy& strategy = preset(IdMap::standard)) {
  if (test.empty()) throw Error("no test events");

  using PairSet = std::array<std::unordered_set<std::uint64_t>, kActionKindCount>;
  std::unordered_map<Symbol, PairSet> known;
  for (const auto& ev : train)
    known[ev.subject.path][static_cast<std::size_t>(ev.action)].insert(make_uuid(ev.object, strategy));

  std::map<Symbol, ProcessUnknownRatio> acc;
  for (const auto& ev : test) {
    auto& r = acc[ev.subject.path];
    r.process_path = ev.subject.path;
    ++r.test_events;
    auto it = known.find(ev.subject.path);
    if (it == known.end() || !it->second[static_cast<std::size_t>(ev.action)].contains(make_uuid(ev.object, strategy)))
      ++r.unknown_events;
  }

  UnknownBehaviorStats out;
  out.per_process.reserve(acc.size());
  for (auto& [_, r] : acc) {
    r.ratio = static_cast<double>(r.unknown_events) / static_cast<double>(r.test_events);
    out.per_process.push_back(r);
  }

  std::vector<double> ratios;
  ratios.reserve(out.per_process.size());
  for (const auto& r : out.per_process) ratios.push_back(r.ratio);
  std::sort(ratios.begin(), ratios.end());
  const double n = static_cast<double>(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) continue;
    out.cdf.emplace_back(ratios[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

inline UnknownBehaviorStats unknown_behavior_stats(const std::vector<Event>& train, const std::vector<Event>& test,
                                                   const UuidStrategy& strategy = preset(IdMap::standard)) {
  return unknown_behavior_stats(std::span<const Event>(train), std::span<const Event>(test), strategy);
}

}  // namespace provkit
