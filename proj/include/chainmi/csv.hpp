// csv.hpp
#pragma once

#include <istream>
#include <string>
#include <vector>

#include "chainmi/metric_core.hpp"

namespace chainmi {

/// Comma-separated numeric rows. Blank lines are skipped, and a first line
/// whose first cell is not a number is taken as a header.
/// Throws ParseError naming the 1-based line and column.
Matrix read_numeric_csv(std::istream& in);
Matrix read_numeric_csv_file(const std::string& path);

}  // namespace chainmi
