// CSV ingestion and deterministic CSV emission.
//
// The formats handled here are plain comma-separated tables with a header
// row, no quoting. Numbers are written with "%.17g" so a value round-trips
// to the identical double and re-running a job reproduces identical bytes.
#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "alcs/errors.hpp"

namespace alcs {

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; -1 when absent.
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  CsvTable table;
  table.path = path;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = detail::split_csv_line(t);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw parse_error(path, line_no,
                        "expected " + std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw input_error("empty file: " + path);
  return table;
}

inline double parse_double(const CsvTable& t, std::size_t row, int col) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw parse_error(t.path, static_cast<long>(row) + 2, "not a number: '" + s + "'");
  return v;
}

inline long parse_long(const CsvTable& t, std::size_t row, int col) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw parse_error(t.path, static_cast<long>(row) + 2, "not an integer: '" + s + "'");
  return v;
}

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << body;
  if (!out) throw input_error("write failed: " + path);
}

// FNV-1a 64-bit checksum, hex encoded; used by the run manifest.
inline std::string fnv1a_hex(const std::string& body) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : body) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace alcs
