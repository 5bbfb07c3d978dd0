#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "provkit/event.hpp"

namespace provkit {

/// 64-bit FNV-1a. Stable across platforms and runs.
inline constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

enum class ProcessKey : std::uint8_t { path_only, pid_and_path };

enum class NetworkKey : std::uint8_t {
  domain_url_addr,  // domain, else url, else src ip/port + dst ip/port
  addr_port,        // src ip/port + dst ip/port
  src_dst_ip,
  dst_ip,
};

/// Which attribute fields identify a node. File, registry key and script
/// identities are fixed (path, path, content).
struct UuidStrategy {
  ProcessKey process = ProcessKey::pid_and_path;
  NetworkKey network = NetworkKey::domain_url_addr;

  friend bool operator==(const UuidStrategy&, const UuidStrategy&) = default;
};

enum class IdMap : std::uint8_t { standard, idmap1, idmap2, idmap3, idmap4, idmap5 };

inline constexpr std::array<IdMap, 6> kAllIdMaps{IdMap::standard, IdMap::idmap1, IdMap::idmap2,
                                                 IdMap::idmap3,   IdMap::idmap4, IdMap::idmap5};

inline constexpr UuidStrategy preset(IdMap m) {
  switch (m) {
    case IdMap::standard: return {ProcessKey::pid_and_path, NetworkKey::domain_url_addr};
    case IdMap::idmap1: return {ProcessKey::pid_and_path, NetworkKey::addr_port};
    case IdMap::idmap2: return {ProcessKey::pid_and_path, NetworkKey::src_dst_ip};
    case IdMap::idmap3: return {ProcessKey::path_only, NetworkKey::domain_url_addr};
    case IdMap::idmap4: return {ProcessKey::pid_and_path, NetworkKey::dst_ip};
    case IdMap::idmap5: return {ProcessKey::path_only, NetworkKey::dst_ip};
  }
  return {};
}

inline constexpr std::string_view to_string(IdMap m) {
  constexpr std::array<std::string_view, 6> names{"DEFAULT", "IDMAP1", "IDMAP2", "IDMAP3", "IDMAP4", "IDMAP5"};
  return names[static_cast<std::size_t>(m)];
}

/// Accepts the CLI spellings: default, 1..5 (also DEFAULT, IDMAP1..IDMAP5).
inline std::optional<IdMap> idmap_from_string(std::string_view s) {
  if (s == "default" || s == "DEFAULT") return IdMap::standard;
  if (s.size() > 5 && (s.substr(0, 5) == "IDMAP" || s.substr(0, 5) == "idmap")) s.remove_prefix(5);
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '5') return static_cast<IdMap>(s[0] - '0');
  return std::nullopt;
}

inline constexpr std::string_view to_string(ProcessKey k) {
  return k == ProcessKey::path_only ? "path_only" : "pid_and_path";
}

inline constexpr std::string_view to_string(NetworkKey k) {
  switch (k) {
    case NetworkKey::domain_url_addr: return "domain_url_addr";
    case NetworkKey::addr_port: return "addr_port";
    case NetworkKey::src_dst_ip: return "src_dst_ip";
    case NetworkKey::dst_ip: return "dst_ip";
  }
  return "?";
}

inline std::string to_string(const UuidStrategy& s) {
  return "{" + std::string(to_string(s.process)) + ", " + std::string(to_string(s.network)) + "}";
}

/// True when every node distinction made by `coarse` is also made by `fine`,
/// i.e. switching fine -> coarse can only merge nodes. Network keys are
/// compared assuming each domain/url resolves to one destination address.
inline constexpr bool is_coarsening(const UuidStrategy& fine, const UuidStrategy& coarse) {
  const bool proc_ok = fine.process == coarse.process || coarse.process == ProcessKey::path_only;
  const bool net_ok = fine.network == coarse.network || coarse.network == NetworkKey::dst_ip ||
                      (fine.network == NetworkKey::addr_port && coarse.network == NetworkKey::src_dst_ip);
  return proc_ok && net_ok;
}

class UuidError : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void missing_field(const EntityAttrs& a, const UuidStrategy& s, std::string_view field) {
  throw UuidError("missing field '" + std::string(field) + "' for " + std::string(to_string(a.kind)) +
                  " node under strategy " + to_string(s));
}

inline void append_field(std::string& out, std::string_view v) {
  out += '|';
  out += v;
}

inline void append_addr_port(std::string& out, const EntityAttrs& a, const UuidStrategy& s) {
  if (!a.src_ip) missing_field(a, s, "src_ip");
  if (!a.src_port) missing_field(a, s, "src_port");
  if (!a.dst_ip) missing_field(a, s, "dst_ip");
  if (!a.dst_port) missing_field(a, s, "dst_port");
  append_field(out, a.src_ip.str());
  append_field(out, std::to_string(*a.src_port));
  append_field(out, a.dst_ip.str());
  append_field(out, std::to_string(*a.dst_port));
}

}  // namespace detail

/// Canonical "kind|f1|f2|..." string of the fields `strategy` selects.
inline std::string identity_string(const EntityAttrs& a, const UuidStrategy& s) {
  std::string out(to_string(a.kind));
  switch (a.kind) {
    case EntityKind::process:
      if (s.process == ProcessKey::pid_and_path) {
        if (!a.pid) detail::missing_field(a, s, "pid");
        detail::append_field(out, std::to_string(*a.pid));
      }
      if (!a.path) detail::missing_field(a, s, "path");
      detail::append_field(out, a.path.str());
      break;
    case EntityKind::file:
    case EntityKind::registry_key:
      if (!a.path) detail::missing_field(a, s, "path");
      detail::append_field(out, a.path.str());
      break;
    case EntityKind::script:
      if (!a.content) detail::missing_field(a, s, "content");
      detail::append_field(out, a.content.str());
      break;
    case EntityKind::network:
      switch (s.network) {
        case NetworkKey::domain_url_addr:
          if (a.domain) {
            detail::append_field(out, "domain");
            detail::append_field(out, a.domain.str());
          } else if (a.url) {
            detail::append_field(out, "url");
            detail::append_field(out, a.url.str());
          } else {
            detail::append_field(out, "addr");
            detail::append_addr_port(out, a, s);
          }
          break;
        case NetworkKey::addr_port:
          detail::append_field(out, "addr");
          detail::append_addr_port(out, a, s);
          break;
        case NetworkKey::src_dst_ip:
          if (!a.src_ip) detail::missing_field(a, s, "src_ip");
          if (!a.dst_ip) detail::missing_field(a, s, "dst_ip");
          detail::append_field(out, "ips");
          detail::append_field(out, a.src_ip.str());
          detail::append_field(out, a.dst_ip.str());
          break;
        case NetworkKey::dst_ip:
          if (!a.dst_ip) detail::missing_field(a, s, "dst_ip");
          detail::append_field(out, "dst");
          detail::append_field(out, a.dst_ip.str());
          break;
      }
      break;
  }
  return out;
}

/// Stable 64-bit node id: FNV-1a over the canonical identity string.
inline std::uint64_t make_uuid(const EntityAttrs& a, const UuidStrategy& s) { return fnv1a64(identity_string(a, s)); }

/// Strategy-independent real-world entity key, prefixed with the kind.
/// Process: image path. File/registry: path. Network: destination IP, falling
/// back to domain then url. Script: hash of the content.
inline Symbol entity_key(const EntityAttrs& a) {
  std::string key(to_string(a.kind));
  key += ':';
  switch (a.kind) {
    case EntityKind::process:
    case EntityKind::file:
    case EntityKind::registry_key:
      if (!a.path) throw UuidError("missing field 'path' for " + std::string(to_string(a.kind)) + " entity key");
      key += a.path.str();
      break;
    case EntityKind::network:
      if (a.dst_ip) key += a.dst_ip.str();
      else if (a.domain) key += a.domain.str();
      else if (a.url) key += a.url.str();
      else throw UuidError("network entity key needs one of dst_ip, domain, url");
      break;
    case EntityKind::script:
      if (!a.content) throw UuidError("missing field 'content' for script entity key");
      key += hex64(fnv1a64(a.content.str()));
      break;
  }
  return Symbol(key);
}

}  // namespace provkit
