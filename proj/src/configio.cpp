#include "gpderiv/configio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gpderiv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + what + ", got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for " + what + ", got '" + v + "'");
  }
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
  return parse_text(read_text_file(path), path);
}

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
  ConfigMap cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
    for (const auto& e : cfg.entries_)
      if (e.section == section && e.key == key)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " +
                          section + "." + key);
    cfg.entries_.push_back({section, key, value});
  }
  return cfg;
}

const std::string* ConfigMap::find(const std::string& section, const std::string& key) const {
  for (const auto& e : entries_)
    if (e.section == section && e.key == key) {
      consumed_.insert({section, key});
      return &e.value;
    }
  return nullptr;
}

const std::string& ConfigMap::require(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) throw ConfigError(origin_ + ": missing required key " + section + "." + key);
  return *v;
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigMap::get_string(const std::string& s, const std::string& k) const {
  return require(s, k);
}
std::string ConfigMap::get_string(const std::string& s, const std::string& k,
                                  const std::string& fallback) const {
  const std::string* v = find(s, k);
  return v ? *v : fallback;
}
double ConfigMap::get_double(const std::string& s, const std::string& k) const {
  return parse_double(require(s, k), s + "." + k);
}
double ConfigMap::get_double(const std::string& s, const std::string& k, double fallback) const {
  const std::string* v = find(s, k);
  return v ? parse_double(*v, s + "." + k) : fallback;
}
std::int64_t ConfigMap::get_int(const std::string& s, const std::string& k) const {
  return parse_int(require(s, k), s + "." + k);
}
std::int64_t ConfigMap::get_int(const std::string& s, const std::string& k,
                                std::int64_t fallback) const {
  const std::string* v = find(s, k);
  return v ? parse_int(*v, s + "." + k) : fallback;
}
std::uint64_t ConfigMap::get_uint64(const std::string& s, const std::string& k,
                                    std::uint64_t fallback) const {
  const std::string* v = find(s, k);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("expected an unsigned integer for " + s + "." + k + ", got '" + *v + "'");
  }
}
bool ConfigMap::get_bool(const std::string& s, const std::string& k, bool fallback) const {
  const std::string* v = find(s, k);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("expected true/false for " + s + "." + k + ", got '" + *v + "'");
}
std::vector<double> ConfigMap::get_double_list(const std::string& s, const std::string& k) const {
  std::vector<double> out;
  for (const auto& item : split_list(require(s, k)))
    out.push_back(parse_double(item, s + "." + k));
  if (out.empty()) throw ConfigError("empty list for " + s + "." + k);
  return out;
}
std::vector<int> ConfigMap::get_int_list(const std::string& s, const std::string& k) const {
  std::vector<int> out;
  for (const auto& item : split_list(require(s, k)))
    out.push_back(static_cast<int>(parse_int(item, s + "." + k)));
  if (out.empty()) throw ConfigError("empty list for " + s + "." + k);
  return out;
}
std::vector<int> ConfigMap::get_int_list(const std::string& s, const std::string& k,
                                         std::vector<int> fallback) const {
  if (!has(s, k)) return fallback;
  return get_int_list(s, k);
}
std::vector<std::string> ConfigMap::get_string_list(const std::string& s,
                                                    const std::string& k) const {
  auto out = split_list(require(s, k));
  if (out.empty()) throw ConfigError("empty list for " + s + "." + k);
  return out;
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  for (auto& e : entries_)
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  entries_.push_back({section, key, value});
}

void ConfigMap::require_all_consumed() const {
  std::vector<std::string> unknown;
  for (const auto& e : entries_)
    if (!consumed_.count({e.section, e.key})) unknown.push_back(e.section + "." + e.key);
  if (!unknown.empty()) {
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& u : unknown) msg += " " + u;
    throw ConfigError(msg);
  }
}

std::string ConfigMap::echo() const {
  std::string out;
  std::string current;
  for (const auto& e : entries_) {
    if (e.section != current) {
      if (!out.empty()) out += "\n";
      out += "[" + e.section + "]\n";
      current = e.section;
    }
    out += e.key + " = " + e.value + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

std::string CsvWriter::format_double(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (in_row_) body_ += ',';
  body_ += v;
  ++in_row_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(std::int64_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw ContractError("CsvWriter: row has " + std::to_string(in_row_) + " cells, expected " +
                        std::to_string(columns_));
  body_ += '\n';
  in_row_ = 0;
}

void CsvWriter::write_file(const std::string& path) const { write_text_file(path, body_); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << text;
  if (!os) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  if (is.bad()) throw IoError("read failed: " + path);
  return os.str();
}

}  // namespace gpderiv
