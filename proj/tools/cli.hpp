#pragma once

#include <string>
#include <vector>

namespace ntdist::cli {

/// Runs one subcommand. args excludes the program name. Returns the exit
/// code: 0 success, 1 selftest failure or I/O error, 2 validation or usage
/// error, 3 accuracy target missed.
int run(const std::vector<std::string>& args);

}  // namespace ntdist::cli
