#pragma once

#include <string>
#include <vector>

namespace oro {

// Entry point behind the `oro` binary. Exit codes: 0 success, 2 configuration
// error, 3 internal invariant violation.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace oro
