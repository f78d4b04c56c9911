#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gpderiv/common.hpp"

namespace gpderiv {

/// Flat key-value config with [section] headers, `key = value` lines and `#`
/// comments. Parsing is strict: after a command handler has read what it
/// needs, `require_all_consumed` rejects any key that was never accessed, so
/// typos never pass silently. Key order is preserved for the round-trip echo.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                std::vector<int> fallback) const;
  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Throws ConfigError naming every key that was never read.
  void require_all_consumed() const;

  /// Serialized form; parses back to an equivalent config.
  std::string echo() const;

 private:
  struct Entry {
    std::string section, key, value;
  };
  const std::string* find(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section, const std::string& key) const;

  std::vector<Entry> entries_;
  std::string origin_;
  mutable std::set<std::pair<std::string, std::string>> consumed_;
};

/// CSV with a header row, UTF-8, '.' decimal separator, 17 significant digits
/// for doubles. Rows are written in call order, so equal inputs give
/// byte-identical bodies.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
  void end_row();

  const std::string& str() const { return body_; }
  void write_file(const std::string& path) const;

  static std::string format_double(double v);

 private:
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  std::string body_;
};

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

/// Reads the whole file, throwing IoError when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace gpderiv
