#include "ionbath/io/table.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ionbath/core/errors.hpp"

namespace ionbath::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == '\t' || c == ' ' || c == ';' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns.at(i);
  }
  throw ConfigError("table has no column '" + name + "'");
}

Table parse_table(const std::string& text, std::size_t min_columns, const std::string& source) {
  Table t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool seen_data = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_fields(line);
    double probe = 0.0;
    if (!seen_data && t.header.empty() && !parse_number(fields.front(), probe)) {
      t.header = fields;
      continue;
    }
    if (fields.size() < min_columns) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected at least " +
                        std::to_string(min_columns) + " columns, found " +
                        std::to_string(fields.size()));
    }
    if (!seen_data) {
      width = fields.size();
      t.columns.assign(width, {});
      seen_data = true;
    } else if (fields.size() != width) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": inconsistent column count (" +
                        std::to_string(fields.size()) + " vs " + std::to_string(width) + ")");
    }
    for (std::size_t i = 0; i < width; ++i) {
      double v = 0.0;
      if (!parse_number(fields[i], v)) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": field " +
                          std::to_string(i + 1) + " is not a number: '" + fields[i] + "'");
      }
      t.columns[i].push_back(v);
    }
  }
  if (!seen_data) throw ConfigError(source + ": no data rows");
  if (!t.header.empty() && t.header.size() != width) {
    throw ConfigError(source + ": header has " + std::to_string(t.header.size()) +
                      " names but rows have " + std::to_string(width) + " columns");
  }
  return t;
}

Table read_table(const std::filesystem::path& path, std::size_t min_columns) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), min_columns, path.string());
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_table(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << format_number(table.columns[c][r]);
    }
    out << '\n';
  }
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_table(out, table);
}

}  // namespace ionbath::io
