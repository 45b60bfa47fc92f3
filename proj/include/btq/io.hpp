// SPDX-License-Identifier: MIT
//
// Experiment plumbing: plain-text section/key=value configs with line-level
// diagnostics, deterministic CSV emission (17 significant digits), and an
// advisory-locked binary cache for eigenvalue blobs.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace btq {

// %.17g, the shortest round-trip-safe fixed emission used by every CSV.
std::string format_g17(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::string path_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& name);

  bool has(const std::string& sec, const std::string& key) const;
  std::string get_string(const std::string& sec, const std::string& key) const;
  std::string get_string(const std::string& sec, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& sec, const std::string& key) const;
  double get_double(const std::string& sec, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& sec, const std::string& key) const;
  int get_int(const std::string& sec, const std::string& key, int fallback) const;
  bool get_bool(const std::string& sec, const std::string& key,
                bool fallback) const;
  // Comma-separated entries; each entry is "n" or "a..b" or "a..b:step".
  std::vector<int> get_int_list(const std::string& sec, const std::string& key) const;

  // Rejects any key not whitelisted for its section (unknown sections too),
  // reporting file and line.
  void require_known(const std::map<std::string, std::set<std::string>>& allowed) const;

  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const {
    return data_;
  }
  const std::string& origin() const { return name_; }

 private:
  std::map<std::string, std::map<std::string, ConfigEntry>> data_;
  std::string name_;
  [[noreturn]] void missing(const std::string& sec, const std::string& key) const;
};

class BlobCache {
 public:
  explicit BlobCache(std::string dir);  // empty dir = disabled
  bool enabled() const { return !dir_.empty(); }
  const std::string& dir() const { return dir_; }

  // Returns the payload on a clean hit; corrupt entries are quarantined
  // (renamed *.bad) and reported as a miss.
  std::optional<std::vector<double>> load(const std::string& kind,
                                          std::uint64_t key) const;
  void store(const std::string& kind, std::uint64_t key,
             const std::vector<double>& payload) const;

  struct GcReport {
    std::uintmax_t bytes_before = 0;
    std::uintmax_t bytes_after = 0;
    int evicted = 0;
    int quarantined = 0;
  };
  // Least-recently-used eviction down to max_bytes; entries exclusively
  // locked by another process are skipped, unreadable ones quarantined.
  GcReport gc(std::uintmax_t max_bytes) const;

 private:
  std::string dir_;
  std::string entry_path(const std::string& kind, std::uint64_t key) const;
};

}  // namespace btq
