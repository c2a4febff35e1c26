#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowlab {

/// Exit codes of the scenario runner.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

/// Runs the command line `args` (args[0] is the program name), writing the
/// human-readable summary to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flowlab
