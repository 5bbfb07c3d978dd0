#pragma once

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "provkit/event.hpp"

namespace provkit {

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string_view require_string(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return j.get_ref<const std::string&>();
}

template <typename Int>
Int require_int(const nlohmann::json& j, const char* key, std::size_t line, long long lo, long long hi) {
  if (!j.is_number_integer()) throw ParseError(line, std::string("field '") + key + "' must be an integer");
  const long long v = j.get<long long>();
  if (v < lo || v > hi) throw ParseError(line, std::string("field '") + key + "' out of range: " + std::to_string(v));
  return static_cast<Int>(v);
}

inline EntityAttrs parse_attrs(const nlohmann::json& j, const char* role, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, std::string("'") + role + "' must be an object");
  EntityAttrs a;
  auto kind_it = j.find("kind");
  if (kind_it == j.end()) throw ParseError(line, std::string("'") + role + "' has no 'kind'");
  const auto kind_text = require_string(*kind_it, "kind", line);
  const auto kind = entity_kind_from_string(kind_text);
  if (!kind) throw ParseError(line, "unknown entity kind '" + std::string(kind_text) + "'");
  a.kind = *kind;

  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (v.is_null() || key == "kind") continue;
    if (key == "pid") a.pid = require_int<std::uint32_t>(v, "pid", line, 0, 0xFFFFFFFFLL);
    else if (key == "path") a.path = Symbol(require_string(v, "path", line));
    else if (key == "cmdline") a.cmdline = Symbol(require_string(v, "cmdline", line));
    else if (key == "domain") a.domain = Symbol(require_string(v, "domain", line));
    else if (key == "url") a.url = Symbol(require_string(v, "url", line));
    else if (key == "src_ip") a.src_ip = Symbol(require_string(v, "src_ip", line));
    else if (key == "dst_ip") a.dst_ip = Symbol(require_string(v, "dst_ip", line));
    else if (key == "src_port") a.src_port = require_int<std::uint16_t>(v, "src_port", line, 0, 65535);
    else if (key == "dst_port") a.dst_port = require_int<std::uint16_t>(v, "dst_port", line, 0, 65535);
    else if (key == "content") a.content = Symbol(require_string(v, "content", line));
    else throw ParseError(line, std::string("unknown field '") + key + "' in '" + role + "'");
  }
  return a;
}

inline ojson attrs_to_json(const EntityAttrs& a) {
  ojson j;
  j["kind"] = to_string(a.kind);
  if (a.pid) j["pid"] = *a.pid;
  if (a.path) j["path"] = a.path.str();
  if (a.cmdline) j["cmdline"] = a.cmdline.str();
  if (a.domain) j["domain"] = a.domain.str();
  if (a.url) j["url"] = a.url.str();
  if (a.src_ip) j["src_ip"] = a.src_ip.str();
  if (a.src_port) j["src_port"] = *a.src_port;
  if (a.dst_ip) j["dst_ip"] = a.dst_ip.str();
  if (a.dst_port) j["dst_port"] = *a.dst_port;
  if (a.content) j["content"] = a.content.str();
  return j;
}

}  // namespace detail

/// Parses one JSON Lines record. `line` is only used in error messages.
inline Event parse_event_line(std::string_view text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line, "record is not a JSON object");

  Event ev;
  auto ts = j.find("ts");
  if (ts == j.end()) throw ParseError(line, "missing 'ts'");
  ev.timestamp = detail::require_int<std::int64_t>(*ts, "ts", line, 0, std::numeric_limits<long long>::max());

  auto action = j.find("action");
  if (action == j.end()) throw ParseError(line, "missing 'action'");
  const auto action_text = detail::require_string(*action, "action", line);
  const auto kind = action_kind_from_string(action_text);
  if (!kind) throw ParseError(line, "unknown action '" + std::string(action_text) + "'");
  ev.action = *kind;

  auto subject = j.find("subject");
  if (subject == j.end()) throw ParseError(line, "missing 'subject'");
  ev.subject = detail::parse_attrs(*subject, "subject", line);
  if (ev.subject.kind != EntityKind::process)
    throw ParseError(line, "subject kind must be 'process', got '" + std::string(to_string(ev.subject.kind)) + "'");

  auto object = j.find("object");
  if (object == j.end()) throw ParseError(line, "missing 'object'");
  ev.object = detail::parse_attrs(*object, "object", line);

  if (auto label = j.find("label"); label != j.end() && !label->is_null()) {
    const auto text = detail::require_string(*label, "label", line);
    const auto l = label_from_string(text);
    if (!l) throw ParseError(line, "unknown label '" + std::string(text) + "'");
    ev.label = *l;
  }
  return ev;
}

/// Serializes one event as a single JSON line (no trailing newline).
/// `seq` is implicit in line order and is not written.
inline std::string serialize_event(const Event& ev) {
  detail::ojson j;
  j["ts"] = ev.timestamp;
  j["action"] = to_string(ev.action);
  j["subject"] = detail::attrs_to_json(ev.subject);
  j["object"] = detail::attrs_to_json(ev.object);
  j["label"] = to_string(ev.label);
  return j.dump();
}

/// Incremental JSON Lines parser enforcing seq numbering and timestamp order.
class TraceParser {
 public:
  /// Returns true if `text` held an event (blank lines are skipped).
  bool feed(std::string_view text, Event& out) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) return false;
    out = parse_event_line(text, line_);
    out.seq = next_seq_;
    if (next_seq_ > 0 && out.timestamp < last_ts_) {
      throw ParseError(line_, "timestamp regression: seq " + std::to_string(next_seq_ - 1) + " has ts " +
                                  std::to_string(last_ts_) + " but seq " + std::to_string(next_seq_) + " has ts " +
                                  std::to_string(out.timestamp));
    }
    last_ts_ = out.timestamp;
    ++next_seq_;
    return true;
  }

 private:
  std::size_t line_ = 0;
  std::uint64_t next_seq_ = 0;
  std::int64_t last_ts_ = 0;
};

/// Parses a JSON Lines trace. Events come back in file order with seq 0..n-1.
inline std::vector<Event> parse_trace(std::istream& in) {
  std::vector<Event> events;
  TraceParser parser;
  std::string line;
  Event ev;
  while (std::getline(in, line))
    if (parser.feed(line, ev)) events.push_back(ev);
  return events;
}

inline std::vector<Event> parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

inline void write_trace(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& ev : events) out << serialize_event(ev) << '\n';
}

/// Reads a trace file; names ending in ".gz" are decompressed on the fly.
inline std::vector<Event> read_trace_file(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) throw Error("cannot open trace '" + path.string() + "'");
    std::string data;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0) data.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(gz);
    if (failed) throw Error("corrupt gzip trace '" + path.string() + "'");
    return parse_trace(std::string_view(data));
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace '" + path.string() + "'");
  return parse_trace(in);
}

inline void write_trace_file(const std::filesystem::path& path, const std::vector<Event>& events) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace '" + path.string() + "'");
  write_trace(out, events);
}

}  // namespace provkit
