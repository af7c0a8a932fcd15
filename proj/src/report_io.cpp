#include "chainmi/report_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace chainmi {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json to_json(const BoundReport& report) {
  Json j;
  j["formula_id"] = report.formula_id;
  j["theorem"] = report.theorem;
  if (report.infinite || std::isinf(report.bound_value)) {
    j["bound_value"] = "inf";
    j["infinite"] = true;
  } else {
    j["bound_value"] = report.bound_value;
    j["infinite"] = false;
  }
  Json terms = Json::array();
  for (const auto& [k, term] : report.per_level_terms) {
    Json t;
    t["k"] = k;
    t["term"] = term;
    terms.push_back(std::move(t));
  }
  j["per_level_terms"] = std::move(terms);
  j["truncation_k"] = report.truncation_k;
  j["tail_estimate"] = report.tail_estimate;
  j["tail_tolerance"] = report.tail_tolerance;
  return j;
}

std::string to_csv(const BoundReport& report) {
  std::ostringstream os;
  os << "row_kind,k,term,bound_value,tail_estimate,truncation_k,formula_id\n";
  for (const auto& [k, term] : report.per_level_terms) {
    os << "level," << k << ',' << format_double(term) << ",,,," << report.formula_id << '\n';
  }
  const double value = report.infinite ? std::numeric_limits<double>::infinity() : report.bound_value;
  os << "summary,,," << format_double(value) << ',' << format_double(report.tail_estimate) << ','
     << report.truncation_k << ',' << report.formula_id << '\n';
  return os.str();
}

}  // namespace chainmi
