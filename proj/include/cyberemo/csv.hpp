#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace cyberemo::csv {

// Shortest form that survives parse-format-parse: 17 significant digits.
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_int(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// RFC 4180 field splitting for a single physical line (no embedded newlines).
inline std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

// Header-indexed CSV table. Line numbers are 1-based and count the header.
struct Table {
  std::vector<std::string> header;
  std::unordered_map<std::string, std::size_t> column;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  bool has(const std::string& name) const { return column.contains(name); }

  std::string_view get(std::size_t row, const std::string& name) const {
    auto it = column.find(name);
    if (it == column.end() || it->second >= rows[row].size()) return {};
    return rows[row][it->second];
  }
};

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (t.header.empty()) {
      if (line.empty()) continue;
      t.header = split_line(line);
      for (std::size_t i = 0; i < t.header.size(); ++i) t.column[t.header[i]] = i;
      continue;
    }
    if (line.empty() || line == "\r") continue;
    t.rows.push_back(split_line(line));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw ValidationError("CSV input has no header");
  return t;
}

}  // namespace cyberemo::csv
