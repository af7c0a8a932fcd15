// report_io.hpp
#pragma once

#include <string>

#include "json.hpp"

#include "chainmi/bound_engine.hpp"

namespace chainmi {

using Json = nlohmann::ordered_json;

/// Infinite bounds serialize as bound_value "inf" with infinite = true.
Json to_json(const BoundReport& report);

/// One row per level, then a summary row carrying the tail and the bound.
/// Header: row_kind,k,term,bound_value,tail_estimate,truncation_k,formula_id
std::string to_csv(const BoundReport& report);

/// Shortest round-trip decimal representation ("inf" for +infinity).
std::string format_double(double v);

}  // namespace chainmi
