#pragma once
// Deterministic CSV emission.  Every table carries a metadata comment line
// (tool version, config fingerprint, seed) followed by a header row naming
// the columns.  Numbers are formatted with %.12g via snprintf, so identical
// inputs produce identical bytes on any platform with IEEE doubles.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace charbox {

using boost::multiprecision::cpp_int;

// FNV-1a 64-bit: the config fingerprint quoted in every output header.
inline u64 fnv1a(std::string_view s) {
  u64 h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(u64 v) {
  char b[17];
  snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
  return b;
}

inline std::string fmt_g(double v) {
  char b[40];
  snprintf(b, sizeof b, "%.12g", v);
  return b;
}

namespace detail {

inline void csv_cell(std::string& out, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}
inline void csv_cell(std::string& out, const char* s) { csv_cell(out, std::string(s)); }
inline void csv_cell(std::string& out, double v) { out += fmt_g(v); }
inline void csv_cell(std::string& out, long double v) { out += fmt_g(static_cast<double>(v)); }
inline void csv_cell(std::string& out, bool v) { out += v ? '1' : '0'; }
inline void csv_cell(std::string& out, const cpp_int& v) { out += v.str(); }
template <class T, std::enable_if_t<std::is_integral_v<T>, int> = 0>
inline void csv_cell(std::string& out, T v) {
  out += std::to_string(v);
}

}  // namespace detail

// One rendered CSV line (no trailing newline); the parallel sweep renders
// rows off-thread with this and merges them in work-item order.
template <class... T>
inline std::string csv_row(const T&... cells) {
  std::string r;
  size_t i = 0;
  ((r += (i++ ? "," : ""), detail::csv_cell(r, cells)), ...);
  return r;
}

// Accumulates one table; bytes() is the complete file image.
class CsvWriter {
 public:
  CsvWriter(std::string_view config_desc, u64 seed, std::vector<std::string> columns)
      : arity_(columns.size()) {
    if (columns.empty()) fail_invalid("a table needs at least one column");
    body_ = "# charbox ";
    body_ += kVersion;
    body_ += " config=" + hex64(fnv1a(config_desc));
    body_ += " seed=" + std::to_string(seed);
    body_ += '\n';
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) body_ += ',';
      detail::csv_cell(body_, columns[i]);
    }
    body_ += '\n';
  }

  template <class... T>
  void row(const T&... cells) {
    if (sizeof...(cells) != arity_) fail_invalid("row arity does not match the header");
    raw_row(csv_row(cells...));
  }

  // pre-rendered row (the parallel sweep path renders rows off-thread)
  void raw_row(const std::string& line) {
    body_ += line;
    body_ += '\n';
    ++rows_;
  }

  u64 rows() const { return rows_; }
  const std::string& bytes() const { return body_; }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail_invalid("cannot open " + path + " for writing");
    f.write(body_.data(), static_cast<std::streamsize>(body_.size()));
    if (!f) fail_invalid("short write to " + path);
  }

 private:
  size_t arity_;
  std::string body_;
  u64 rows_ = 0;
};

// Minimal reader for our own tables: skips # comments, understands quoted
// cells, returns header + rows of strings.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    fail_invalid("no column named " + name);
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline CsvData parse_csv(const std::string& bytes) {
  CsvData d;
  size_t pos = 0;
  while (pos < bytes.size()) {
    size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (d.columns.empty())
      d.columns = std::move(cells);
    else
      d.rows.push_back(std::move(cells));
  }
  if (d.columns.empty()) fail_invalid("table has no header row");
  return d;
}

}  // namespace charbox
