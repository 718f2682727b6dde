#pragma once

#include <string>
#include <vector>

namespace maxprod::cli {

// Runs one CLI invocation. Exit codes: 0 success, 1 data/math error,
// 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args after the program name

}  // namespace maxprod::cli
