// csv.hpp -- minimal CSV reading/writing for the result files
//
// Fields never contain commas, quotes or newlines (writers sanitize free
// text), so no quoting is needed. Doubles are written with 17 significant
// digits, enough to round-trip.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  if (s == "nan" || s.empty()) return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  const std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("not a number: '" + tmp + "'");
  }
  if (used != tmp.size()) throw std::runtime_error("not a number: '" + tmp + "'");
  return v;
}

inline std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end) throw std::runtime_error("not a non-negative integer: '" + std::string(s) + "'");
  return v;
}

inline std::string sanitize_field(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("CSV column '" + std::string(name) + "' not found");
  }
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) throw std::runtime_error("CSV row has wrong number of fields: " + line);
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::runtime_error("CSV input is empty");
  return t;
}

}  // namespace qrc
