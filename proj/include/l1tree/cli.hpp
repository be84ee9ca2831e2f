#pragma once

#include <string>
#include <vector>

namespace l1tree {

// Runs the command-line tool. Exit codes: 0 success, 2 configuration error,
// 3 data error, 4 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace l1tree
