#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "provkit/error.hpp"
#include "provkit/symbol.hpp"

namespace provkit {

enum class EntityKind : std::uint8_t { process, file, network, registry_key, script };

inline constexpr std::size_t kEntityKindCount = 5;

enum class ActionKind : std::uint8_t {
  exec,
  fork,
  read,
  write,
  open,
  close,
  connect,
  send,
  recv,
  load,
  modify_registry,
  run_script,
  del,  // "delete" on the wire
};

inline constexpr std::size_t kActionKindCount = 13;

enum class Label : std::uint8_t { benign, malicious };

inline constexpr std::array<std::string_view, kEntityKindCount> kEntityKindNames{
    "process", "file", "network", "registry_key", "script"};

inline constexpr std::array<std::string_view, kActionKindCount> kActionKindNames{
    "exec", "fork", "read", "write", "open", "close", "connect",
    "send", "recv", "load", "modify_registry", "run_script", "delete"};

inline constexpr std::string_view to_string(EntityKind k) { return kEntityKindNames[static_cast<std::size_t>(k)]; }
inline constexpr std::string_view to_string(ActionKind a) { return kActionKindNames[static_cast<std::size_t>(a)]; }
inline constexpr std::string_view to_string(Label l) { return l == Label::malicious ? "malicious" : "benign"; }

inline std::optional<EntityKind> entity_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEntityKindNames.size(); ++i)
    if (kEntityKindNames[i] == s) return static_cast<EntityKind>(i);
  return std::nullopt;
}

inline std::optional<ActionKind> action_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kActionKindNames.size(); ++i)
    if (kActionKindNames[i] == s) return static_cast<ActionKind>(i);
  return std::nullopt;
}

inline std::optional<Label> label_from_string(std::string_view s) {
  if (s == "benign") return Label::benign;
  if (s == "malicious") return Label::malicious;
  return std::nullopt;
}

/// Attributes describing one system entity as seen in a single event.
/// Which fields are required depends on the kind and the active UUID strategy,
/// so nothing is enforced here.
struct EntityAttrs {
  EntityKind kind = EntityKind::process;
  std::optional<std::uint32_t> pid;
  Symbol path;     // process image, file, or registry key path
  Symbol cmdline;  // process
  Symbol domain;   // network
  Symbol url;      // network
  Symbol src_ip;   // network
  Symbol dst_ip;   // network
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  Symbol content;  // script body

  friend bool operator==(const EntityAttrs&, const EntityAttrs&) = default;
};

/// One audited system event: a process acting on an object.
struct Event {
  std::uint64_t seq = 0;
  std::int64_t timestamp = 0;  // ns since trace epoch
  EntityAttrs subject;
  ActionKind action = ActionKind::read;
  EntityAttrs object;
  Label label = Label::benign;

  friend bool operator==(const Event&, const Event&) = default;
};

// Convenience constructors, mostly for fixtures and the generator.

inline EntityAttrs process_attrs(std::uint32_t pid, std::string_view path, std::string_view cmdline = {}) {
  EntityAttrs a;
  a.kind = EntityKind::process;
  a.pid = pid;
  a.path = Symbol(path);
  a.cmdline = Symbol(cmdline);
  return a;
}

inline EntityAttrs file_attrs(std::string_view path) {
  EntityAttrs a;
  a.kind = EntityKind::file;
  a.path = Symbol(path);
  return a;
}

inline EntityAttrs registry_attrs(std::string_view path) {
  EntityAttrs a;
  a.kind = EntityKind::registry_key;
  a.path = Symbol(path);
  return a;
}

inline EntityAttrs script_attrs(std::string_view content) {
  EntityAttrs a;
  a.kind = EntityKind::script;
  a.content = Symbol(content);
  return a;
}

inline EntityAttrs network_attrs(std::string_view domain, std::string_view url, std::string_view src_ip,
                                 std::uint16_t src_port, std::string_view dst_ip, std::uint16_t dst_port) {
  EntityAttrs a;
  a.kind = EntityKind::network;
  a.domain = Symbol(domain);
  a.url = Symbol(url);
  a.src_ip = Symbol(src_ip);
  a.src_port = src_port;
  a.dst_ip = Symbol(dst_ip);
  a.dst_port = dst_port;
  return a;
}

}  // namespace provkit
