#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace provkit {

namespace detail {

// Process-wide string table. Entries are never freed, so views stay valid.
class SymbolTable {
 public:
  SymbolTable() { strings_.emplace_back(); }

  std::uint32_t intern(std::string_view s) {
    if (s.empty()) return 0;
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(s); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(s); it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(strings_.size());
    const std::string& stored = strings_.emplace_back(s);
    index_.emplace(std::string_view(stored), id);
    return id;
  }

  std::string_view lookup(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    return strings_[id];
  }

  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::string> strings_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

}  // namespace detail

/// Interned string. The empty string doubles as "absent".
///
/// Equality and hashing use the intern id; ordering is lexicographic on the
/// text so that sorted output never depends on interning order.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view text) : id_(detail::SymbolTable::instance().intern(text)) {}

  std::string_view str() const { return id_ == 0 ? std::string_view{} : detail::SymbolTable::instance().lookup(id_); }
  std::string string() const { return std::string(str()); }
  bool empty() const noexcept { return id_ == 0; }
  explicit operator bool() const noexcept { return id_ != 0; }
  std::uint32_t id() const noexcept { return id_; }

  friend bool operator==(Symbol a, Symbol b) noexcept { return a.id_ == b.id_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.id_ == b.id_) return std::strong_ordering::equal;
    const int c = a.str().compare(b.str());
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

 private:
  std::uint32_t id_ = 0;
};

}  // namespace provkit

template <>
struct std::hash<provkit::Symbol> {
  std::size_t operator()(provkit::Symbol s) const noexcept { return std::hash<std::uint32_t>{}(s.id()); }
};
