#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ionbath::io {

/// Column-oriented numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

/// Parses delimited numeric text. Delimiters: comma, tab or spaces. Lines starting
/// with '#' are comments; a first non-comment line that is not numeric is the header.
/// Throws ConfigError naming the offending line when a row has fewer than
/// `min_columns` fields or a field is not a number.
Table parse_table(const std::string& text, std::size_t min_columns, const std::string& source = "<string>");
Table read_table(const std::filesystem::path& path, std::size_t min_columns);

/// Writes CSV with a header row; numbers use a fixed 12-significant-digit format so
/// that identical inputs give byte-identical files.
void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& path, const Table& table);

std::string format_number(double v);

}  // namespace ionbath::io
