#include "chainmi/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "chainmi/error.hpp"

namespace chainmi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Matrix read_numeric_csv(std::istream& in) {
  Matrix rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      const std::string t = trim(cell);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        // A first line that opens with a non-number is a header.
        if (rows.empty() && !header_seen && col == 1) {
          header_seen = true;
          break;
        }
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ", column " +
                                          std::to_string(col) + ": not a number: '" + t + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

Matrix read_numeric_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  return read_numeric_csv(in);
}

}  // namespace chainmi
