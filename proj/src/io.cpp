// SPDX-License-Identifier: MIT

#include "btq/io.hpp"

#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "btq/errors.hpp"

namespace btq {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* b = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= b[i];
    h *= 1099511628211ull;
  }
  return h;
}

constexpr char kMagic[4] = {'B', 'T', 'Q', 'E'};
constexpr std::uint32_t kVersion = 1;

struct BlobHeader {
  char magic[4];
  std::uint32_t version;
  std::uint64_t key;
  std::uint64_t count;
  std::uint64_t checksum;
};

class ScopedLock {
 public:
  ScopedLock(FILE* f, int op) : fd_(fileno(f)) { ok_ = ::flock(fd_, op) == 0; }
  ~ScopedLock() {
    if (ok_) ::flock(fd_, LOCK_UN);
  }
  bool ok() const { return ok_; }

 private:
  int fd_;
  bool ok_ = false;
};

void quarantine(const std::string& path) {
  std::error_code ec;
  fs::rename(path, path + ".bad", ec);  // best effort; never throw here
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : width_(header.size()), path_(path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw config_error("cannot open output file: " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw config_error("csv row width mismatch in " + path_);
  // validate before emitting anything: a rejected row must not leave a
  // partial line behind
  for (const std::string& cell : cells)
    if (cell.find_first_of(",\"\n") != std::string::npos)
      throw config_error("csv cell needs quoting (unsupported): " + cell);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw numeric_error("csv write failed: " + path_);
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
  ConfigFile cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw config_error(name + ":" + std::to_string(line) +
                           ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty())
        throw config_error(name + ":" + std::to_string(line) + ": empty section name");
      cfg.data_[section];  // empty sections are allowed
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error(name + ":" + std::to_string(line) +
                         ": expected key = value");
    if (section.empty())
      throw config_error(name + ":" + std::to_string(line) +
                         ": key outside any [section]");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw config_error(name + ":" + std::to_string(line) + ": empty key");
    auto& sec = cfg.data_[section];
    if (sec.count(key))
      throw config_error(name + ":" + std::to_string(line) + ": duplicate key '" +
                         key + "' (first at line " +
                         std::to_string(sec[key].line) + ")");
    sec[key] = ConfigEntry{value, line};
  }
  return cfg;
}

void ConfigFile::missing(const std::string& sec, const std::string& key) const {
  throw config_error(name_ + ": missing required key '" + key + "' in [" + sec + "]");
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  const auto s = data_.find(sec);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key) const {
  const auto s = data_.find(sec);
  if (s == data_.end()) missing(sec, key);
  const auto k = s->second.find(key);
  if (k == s->second.end()) missing(sec, key);
  return k->second.value;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key,
                                   const std::string& fallback) const {
  return has(sec, key) ? get_string(sec, key) : fallback;
}

double ConfigFile::get_double(const std::string& sec, const std::string& key) const {
  const std::string v = get_string(sec, key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw config_error(name_ + ":" + std::to_string(data_.at(sec).at(key).line) +
                       ": '" + key + "' is not a number: " + v);
  }
}

double ConfigFile::get_double(const std::string& sec, const std::string& key,
                              double fallback) const {
  return has(sec, key) ? get_double(sec, key) : fallback;
}

int ConfigFile::get_int(const std::string& sec, const std::string& key) const {
  const std::string v = get_string(sec, key);
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size() || d != static_cast<int>(d)) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw config_error(name_ + ":" + std::to_string(data_.at(sec).at(key).line) +
                       ": '" + key + "' is not an integer: " + v);
  }
}

int ConfigFile::get_int(const std::string& sec, const std::string& key,
                        int fallback) const {
  return has(sec, key) ? get_int(sec, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& sec, const std::string& key,
                          bool fallback) const {
  if (!has(sec, key)) return fallback;
  const std::string v = get_string(sec, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error(name_ + ":" + std::to_string(data_.at(sec).at(key).line) +
                     ": '" + key + "' is not a boolean: " + v);
}

std::vector<int> ConfigFile::get_int_list(const std::string& sec,
                                          const std::string& key) const {
  const std::string v = get_string(sec, key);
  const int line = data_.at(sec).at(key).line;
  auto fail = [&]() -> void {
    throw config_error(name_ + ":" + std::to_string(line) + ": '" + key +
                       "' must be a list like 8,32 or 100..400:10, got: " + v);
  };
  std::vector<int> out;
  std::istringstream ss(v);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    piece = trim(piece);
    if (piece.empty()) fail();
    const std::size_t dots = piece.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(piece));
        continue;
      }
      const int a = std::stoi(piece.substr(0, dots));
      std::string rest = piece.substr(dots + 2);
      int step = 1;
      const std::size_t colon = rest.find(':');
      if (colon != std::string::npos) {
        step = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const int b = std::stoi(rest);
      if (step <= 0 || b < a) fail();
      for (int x = a; x <= b; x += step) out.push_back(x);
    } catch (const config_error&) {
      throw;
    } catch (const std::exception&) {
      fail();
    }
  }
  if (out.empty()) fail();
  return out;
}

void ConfigFile::require_known(
    const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [sec, keys] : data_) {
    const auto it = allowed.find(sec);
    if (it == allowed.end())
      throw config_error(name_ + ": unknown section [" + sec + "]");
    for (const auto& [key, entry] : keys) {
      if (!it->second.count(key))
        throw config_error(name_ + ":" + std::to_string(entry.line) +
                           ": unknown key '" + key + "' in [" + sec + "]");
    }
  }
}

BlobCache::BlobCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string BlobCache::entry_path(const std::string& kind, std::uint64_t key) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(key));
  return dir_ + "/" + kind + "-" + buf + ".blob";
}

std::optional<std::vector<double>> BlobCache::load(const std::string& kind,
                                                   std::uint64_t key) const {
  if (!enabled()) return std::nullopt;
  const std::string path = entry_path(kind, key);
  FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return std::nullopt;
  ScopedLock lock(f, LOCK_SH);
  BlobHeader hdr{};
  std::vector<double> payload;
  bool ok = lock.ok() && std::fread(&hdr, sizeof hdr, 1, f) == 1 &&
            std::memcmp(hdr.magic, kMagic, 4) == 0 && hdr.version == kVersion &&
            hdr.key == key && hdr.count < (1ull << 32);
  if (ok) {
    payload.resize(hdr.count);
    ok = std::fread(payload.data(), sizeof(double), payload.size(), f) ==
             payload.size() &&
         std::fgetc(f) == EOF &&
         fnv1a(payload.data(), payload.size() * sizeof(double),
               1469598103934665603ull) == hdr.checksum;
  }
  std::fclose(f);
  if (!ok) {
    quarantine(path);
    return std::nullopt;
  }
  return payload;
}

void BlobCache::store(const std::string& kind, std::uint64_t key,
                      const std::vector<double>& payload) const {
  if (!enabled()) return;
  const std::string path = entry_path(kind, key);
  const std::string tmp = path + "." + std::to_string(::getpid()) + ".tmp";
  FILE* f = std::fopen(tmp.c_str(), "wb");
  if (f == nullptr) throw numeric_error("cache: cannot create " + tmp);
  BlobHeader hdr{};
  std::memcpy(hdr.magic, kMagic, 4);
  hdr.version = kVersion;
  hdr.key = key;
  hdr.count = payload.size();
  hdr.checksum =
      fnv1a(payload.data(), payload.size() * sizeof(double), 1469598103934665603ull);
  ScopedLock lock(f, LOCK_EX);
  const bool ok = lock.ok() && std::fwrite(&hdr, sizeof hdr, 1, f) == 1 &&
                  std::fwrite(payload.data(), sizeof(double), payload.size(), f) ==
                      payload.size();
  std::fclose(f);
  if (!ok) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw numeric_error("cache: write failed for " + path);
  }
  fs::rename(tmp, path);
}

BlobCache::GcReport BlobCache::gc(std::uintmax_t max_bytes) const {
  GcReport rep;
  if (!enabled()) return rep;
  struct Entry {
    fs::path path;
    std::uintmax_t size;
    fs::file_time_type mtime;
  };
  std::vector<Entry> entries;
  for (const auto& de : fs::directory_iterator(dir_)) {
    if (!de.is_regular_file() || de.path().extension() != ".blob") continue;
    // Unreadable headers get quarantined rather than deleted.
    FILE* f = std::fopen(de.path().c_str(), "rb");
    BlobHeader hdr{};
    const bool readable = f != nullptr && std::fread(&hdr, sizeof hdr, 1, f) == 1 &&
                          std::memcmp(hdr.magic, kMagic, 4) == 0 &&
                          hdr.version == kVersion;
    if (f != nullptr) std::fclose(f);
    if (!readable) {
      quarantine(de.path().string());
      ++rep.quarantined;
      continue;
    }
    entries.push_back({de.path(), de.file_size(), de.last_write_time()});
    rep.bytes_before += de.file_size();
  }
  rep.bytes_after = rep.bytes_before;
  if (rep.bytes_after <= max_bytes) return rep;
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.mtime < b.mtime; });
  for (const Entry& e : entries) {
    if (rep.bytes_after <= max_bytes) break;
    FILE* f = std::fopen(e.path.c_str(), "rb");
    if (f == nullptr) continue;
    // Skip entries another process holds locked.
    if (::flock(fileno(f), LOCK_EX | LOCK_NB) != 0) {
      std::fclose(f);
      continue;
    }
    ::flock(fileno(f), LOCK_UN);
    std::fclose(f);
    std::error_code ec;
    if (fs::remove(e.path, ec)) {
      rep.bytes_after -= e.size;
      ++rep.evicted;
    }
  }
  return rep;
}

}  // namespace btq
