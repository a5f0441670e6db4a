#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psdbscan {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitProtocol = 3 };

/// Runs the command line with args excluding the program name. Labels and
/// tables go to `out` unless redirected to a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psdbscan
