#pragma once

#include <string>
#include <vector>

namespace socsim::cli {

// Operator entry point. Exit codes: 0 success, 1 runtime failure,
// 2 usage/config error.
int run_cli(std::vector<std::string> args);

} // namespace socsim::cli
