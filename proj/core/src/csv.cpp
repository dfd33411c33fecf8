#include "hdboot/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hdboot {

namespace {

// Splits one CSV record; handles quoted fields with doubled quotes.
std::vector<std::string> split_record(const std::string& line, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // tolerated at end of line
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw ParseError("unterminated quote at row " + std::to_string(row));
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("cannot parse '" + field + "' as a number at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path + " is empty (header row required)");
  }
  CsvTable table;
  table.columns = split_record(line, 1);
  const std::size_t width = table.columns.size();

  std::vector<std::vector<double>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_record(line, row);
    if (fields.size() != width) {
      throw ParseError("row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    }
    std::vector<double> parsed(width);
    for (std::size_t c = 0; c < width; ++c) {
      parsed[c] = parse_number(fields[c], row, c + 1);
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) {
    throw ParseError(path + " has no data rows");
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return table;
}

}  // namespace hdboot
