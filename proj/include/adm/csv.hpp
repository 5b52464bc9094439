#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adm/error.hpp"

namespace adm {

/// Shortest round-trip text for a double; "nan", "inf", "-inf" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Buffered CSV table: one "# key=value" comment line, a header row, then data rows.
class CsvTable {
 public:
  CsvTable(std::string comment, std::vector<std::string> columns)
      : comment_(std::move(comment)), columns_(std::move(columns)) {}

  class Row {
   public:
    explicit Row(CsvTable& t) : table_(t) {}
    Row& operator<<(double v) { return cell(format_double(v)); }
    Row& operator<<(int v) { return cell(std::to_string(v)); }
    Row& operator<<(long v) { return cell(std::to_string(v)); }
    Row& operator<<(bool v) { return cell(v ? "1" : "0"); }
    Row& operator<<(std::string_view v) { return cell(std::string(v)); }
    Row& operator<<(const char* v) { return cell(v); }
    ~Row() { table_.rows_.push_back(std::move(cells_)); }

   private:
    Row& cell(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    CsvTable& table_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }
  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::ostringstream os;
    if (!comment_.empty()) os << "# " << comment_ << "\n";
    join(os, columns_);
    for (const auto& r : rows_) join(os, r);
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << str();
    if (!os) throw IoError("write failed for " + path);
  }

 private:
  static void join(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }

  std::string comment_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: comment lines (without "# ") plus a header and string cells.
struct CsvData {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError("missing CSV column '" + std::string(name) + "'");
  }
};

inline CsvData read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  CsvData d;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      d.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (d.header.empty())
      d.header = std::move(cells);
    else
      d.rows.push_back(std::move(cells));
  }
  if (d.header.empty()) throw IoError(path + " has no header row");
  return d;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

}  // namespace adm
