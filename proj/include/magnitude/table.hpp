#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "magnitude/error.hpp"

namespace magnitude {

/// Rectangular table of named real-valued columns.
///
/// On disk: UTF-8, LF line endings, one header line "# name<TAB>name...",
/// then one tab-separated row per line. Numbers use the shortest decimal form
/// that reads back to the same double.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    detail::require(row.size() == columns.size(),
                    "table row has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(columns.size()),
                    ErrorCode::table_format);
    rows.push_back(std::move(row));
  }

  /// Index of the named column; throws if absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw Error(ErrorCode::table_format, "table has no column '" + std::string(name) + "'");
  }

  bool has_column(std::string_view name) const {
    for (const auto& c : columns) {
      if (c == name) return true;
    }
    return false;
  }

  friend bool operator==(const Table&, const Table&) = default;
};

inline std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::table_format, "cannot format number");
  return std::string(buf, end);
}

inline double parse_number(std::string_view cell) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || end != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorCode::table_format, "non-numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

inline void write_table(const Table& table, std::ostream& out) {
  out << '#';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const auto& name = table.columns[i];
    detail::require(name.find_first_of("\t\n\r") == std::string::npos && !name.empty(),
                    "column names must be non-empty and free of tabs and line breaks",
                    ErrorCode::table_format);
    out << (i == 0 ? " " : "\t") << name;
  }
  out << '\n';
  for (const auto& row : table.rows) {
    detail::require(row.size() == table.columns.size(), "ragged table row", ErrorCode::table_format);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out << '\t';
      out << format_number(row[i]);
    }
    out << '\n';
  }
}

inline std::string to_string(const Table& table) {
  std::ostringstream os;
  write_table(table, os);
  return os.str();
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace detail

inline Table read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line.front() != '#') {
    throw Error(ErrorCode::table_format, "table must start with a '#' header line");
  }
  Table table;
  std::string_view header(line);
  header.remove_prefix(1);
  while (!header.empty() && header.front() == ' ') header.remove_prefix(1);
  if (!header.empty()) {
    for (auto name : detail::split_tabs(header)) {
      detail::require(!name.empty(), "empty column name in header", ErrorCode::table_format);
      table.columns.emplace_back(name);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = detail::split_tabs(line);
    if (cells.size() != table.columns.size() || table.columns.empty()) {
      throw Error(ErrorCode::table_format, "line " + std::to_string(line_no) + ": expected " +
                                               std::to_string(table.columns.size()) +
                                               " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto cell : cells) row.push_back(parse_number(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return read_table(in);
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_table(const Table& table, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + tmp.string() + "' for writing");
    write_table(table, out);
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot move table into '" + path.string() + "'");
  }
}

}  // namespace magnitude
