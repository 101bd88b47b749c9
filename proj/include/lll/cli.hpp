#pragma once

#include <string>
#include <vector>

namespace lll {

// Parses and runs one CLI invocation. Exit codes: 0 ok, 1 verification or
// convergence failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace lll
