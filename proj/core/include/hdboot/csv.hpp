#pragma once

#include <string>
#include <vector>

#include "hdboot/data.hpp"

namespace hdboot {

struct CsvTable {
  std::vector<std::string> columns;
  Matrix values;  // rows x columns, all numeric
};

/// Reads an RFC-4180 style CSV with a mandatory header row; every data
/// cell must parse as a finite number. Errors report 1-based row/column.
CsvTable read_numeric_csv(const std::string& path);

}  // namespace hdboot
