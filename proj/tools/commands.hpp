#pragma once

#include <string>
#include <vector>

#include "cli_common.hpp"

namespace chainmi::cli {

/// Each command returns a process exit code.
int run_example1(const Settings& s, const std::vector<std::string>& epsilon_flags);
int run_bounds(const Settings& s);
int run_simulate(const Settings& s);

}  // namespace chainmi::cli
