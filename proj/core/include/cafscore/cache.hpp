// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cafscore/types.hpp"

namespace cafscore {

/// SHA-256 over the canonical form of (model_id, request kind, payload,
/// prompt template version).
struct CacheKey {
  std::string digest;

  static CacheKey make(std::string_view model_id, std::string_view request_kind,
                       const Json& payload, std::string_view template_version);

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

struct GcSummary {
  std::size_t entries_before = 0;
  std::size_t evicted = 0;
  std::size_t skipped_pinned = 0;
  std::uintmax_t bytes_before = 0;
  std::uintmax_t bytes_after = 0;
};

/// Content-addressed on-disk cache. One file per entry at
/// <root>/<d0d1>/<d2d3>/<digest>.json; writes go to a temporary file and are
/// renamed into place so readers never see partial entries. Entry mtime is
/// the last-use time for LRU eviction.
///
/// Keys read or written through an instance are pinned for its lifetime and
/// survive gc() on that instance.
class Cache {
 public:
  explicit Cache(std::filesystem::path root);

  /// $CAF_CACHE_DIR, else $XDG_CACHE_HOME/cafscore, else ~/.cache/cafscore.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_for(const CacheKey& key) const;

  std::optional<std::string> get(const CacheKey& key);
  void put(const CacheKey& key, std::string_view bytes);

  void pin(const CacheKey& key);
  void release_pins();

  /// Evicts least-recently-used unpinned entries until the total size is at
  /// most max_bytes.
  GcSummary gc(std::uintmax_t max_bytes);

 private:
  std::filesystem::path root_;
  std::mutex mu_;
  std::set<std::string> pinned_;
};

}  // namespace cafscore
