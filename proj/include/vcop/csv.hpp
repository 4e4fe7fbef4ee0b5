#pragma once

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Core>

#include "vcop/common.hpp"

namespace vcop {

/// Numeric table read from disk: named columns, an optional leading ISO-8601
/// date column (kept as strings), and the value matrix. Rows align across
/// dates and values.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::string> dates;  // empty when the file has no date column
  Eigen::MatrixXd values;

  int rows() const { return static_cast<int>(values.rows()); }

  /// Index of a named column, or -1 when absent.
  int find_column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
};

/// YYYY-MM-DD with plausible month/day parts.
inline bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (const int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[static_cast<std::size_t>(i)]))) return false;
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_csv_number(const std::string& field, const std::string& where) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError("malformed numeric field '" + field + "' at " + where);
  return value;
}

}  // namespace detail

/// Strict reader: '#'-prefixed comment lines may precede the header; the
/// header row is required; fields are comma-separated; the first column is
/// treated as an ISO-8601 date column when its first data cell parses as one.
/// Any malformed row (wrong arity, bad number) is a hard error.
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open input file " + path.string());

  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.empty()) throw DataError("missing header row in " + path.string());

  std::vector<std::vector<std::string>> rows;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("row with " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()) + " at " + path.string() + ":" +
                      std::to_string(line_no));
    rows.push_back(std::move(fields));
  }

  CsvTable table;
  const bool has_dates = !rows.empty() && is_iso_date(rows.front().front());
  const std::size_t first_numeric = has_dates ? 1 : 0;
  table.columns.assign(header.begin() + static_cast<std::ptrdiff_t>(first_numeric), header.end());
  if (table.columns.empty()) throw DataError("no numeric columns in " + path.string());
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (has_dates) {
      if (!is_iso_date(rows[i][0]))
        throw DataError("malformed date '" + rows[i][0] + "' in " + path.string());
      table.dates.push_back(rows[i][0]);
    }
    for (std::size_t j = first_numeric; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - first_numeric)) =
          detail::parse_csv_number(rows[i][j],
                                   path.string() + " row " + std::to_string(i + 1));
  }
  return table;
}

/// Shortest round-trip decimal representation; the formatting contract
/// deterministic outputs rely on.
inline std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericalError("failed to format number");
  return std::string(buf, ptr);
}

/// Writes comments ('#'-prefixed), a header, and rows; the date column (when
/// provided) is prepended. The file appears atomically via a temp + rename.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& comments,
                      const std::vector<std::string>& header,
                      const std::vector<std::string>& dates, const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols() + (dates.empty() ? 0 : 1))
    throw ConfigError("csv header width does not match the data");
  if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != values.rows())
    throw ConfigError("csv date column length does not match the data");

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write output file " + tmp.string());
    for (const auto& comment : comments) out << "# " << comment << "\n";
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j == 0 ? "" : ",") << header[j];
    out << "\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      if (!dates.empty()) out << dates[static_cast<std::size_t>(i)] << ",";
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        out << (j == 0 ? "" : ",") << format_double(values(i, j));
      out << "\n";
    }
    if (!out) throw DataError("failed while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Writes a text file atomically (temp + rename).
inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write output file " + tmp.string());
    out << content;
    if (!out) throw DataError("failed while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace vcop
