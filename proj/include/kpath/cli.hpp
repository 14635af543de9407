#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kpath {

/// Exit status contract of the command-line tool.
enum ExitCode : int { kExitYes = 0, kExitNo = 1, kExitUsage = 2, kExitCap = 3 };

/// Runs one command line (without the program name). Subcommands: solve, verify,
/// family, optimize, bench.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace kpath
