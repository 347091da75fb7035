// SPDX-License-Identifier: Apache-2.0
#include "cafscore/cache.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "cafscore/canonical.hpp"
#include "cafscore/errors.hpp"

namespace cafscore {

namespace fs = std::filesystem;

CacheKey CacheKey::make(std::string_view model_id, std::string_view request_kind, const Json& payload,
                        std::string_view template_version) {
  const Json material{{"model_id", model_id},
                      {"kind", request_kind},
                      {"payload", payload},
                      {"template_version", template_version}};
  return CacheKey{sha256_hex(canonical_dump(material))};
}

Cache::Cache(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError(root_.string() + ": " + ec.message());
}

fs::path Cache::default_root() {
  if (const char* dir = std::getenv("CAF_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "cafscore";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "cafscore";
  return fs::path(".cafscore-cache");
}

fs::path Cache::path_for(const CacheKey& key) const {
  if (key.digest.size() < 4) throw DomainError("cache key digest too short");
  return root_ / key.digest.substr(0, 2) / key.digest.substr(2, 2) / (key.digest + ".json");
}

std::optional<std::string> Cache::get(const CacheKey& key) {
  const fs::path path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  pin(key);
  std::error_code ec;
  fs::last_write_time(path, fs::file_time_type::clock::now(), ec);  // LRU touch; best effort
  return ss.str();
}

void Cache::put(const CacheKey& key, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  const fs::path path = path_for(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());

  std::ostringstream tmp_name;
  tmp_name << "." << key.digest << ".tmp." << ::getpid() << "."
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path.string() + ": rename failed");
  }
  pin(key);
}

void Cache::pin(const CacheKey& key) {
  std::lock_guard lock(mu_);
  pinned_.insert(key.digest);
}

void Cache::release_pins() {
  std::lock_guard lock(mu_);
  pinned_.clear();
}

GcSummary Cache::gc(std::uintmax_t max_bytes) {
  struct Entry {
    fs::file_time_type mtime;
    fs::path path;
    std::uintmax_t size;
    bool pinned;
  };
  std::vector<Entry> entries;
  GcSummary summary;
  std::set<std::string> pinned;
  {
    std::lock_guard lock(mu_);
    pinned = pinned_;
  }

  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root_, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file() || it->path().extension() != ".json") continue;
    const std::string digest = it->path().stem().string();
    entries.push_back(Entry{it->last_write_time(), it->path(), it->file_size(), pinned.contains(digest)});
  }
  if (ec) throw IoError(root_.string() + ": " + ec.message());

  summary.entries_before = entries.size();
  for (const auto& e : entries) summary.bytes_before += e.size;
  summary.bytes_after = summary.bytes_before;

  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return std::tie(a.mtime, a.path) < std::tie(b.mtime, b.path); });
  for (const auto& e : entries) {
    if (summary.bytes_after <= max_bytes) break;
    if (e.pinned) {
      ++summary.skipped_pinned;
      continue;
    }
    fs::remove(e.path, ec);
    if (ec) throw IoError(e.path.string() + ": " + ec.message());
    summary.bytes_after -= e.size;
    ++summary.evicted;
  }
  return summary;
}

}  // namespace cafscore
