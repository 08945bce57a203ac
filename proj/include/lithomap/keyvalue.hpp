#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lithomap {

/// Flat `key = value` text used for pipeline, radiometry and scene configs.
/// Lines starting with '#' are comments; keys are case-sensitive and
/// trimmed; later duplicates win.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

  /// Throws InvalidConfig when the key is absent.
  std::string require(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Canonical serialization (sorted keys), used for config hashing.
  std::string to_string() const;

  /// Directory of the file it was loaded from, for resolving relative paths.
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s, const std::string& what);
std::int64_t parse_int(const std::string& s, const std::string& what);

/// Read a small comma-separated file. The first row is returned as header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by (case-insensitive) name, or throws InvalidConfig.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace lithomap
