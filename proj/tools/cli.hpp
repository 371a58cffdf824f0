#pragma once

#include <iosfwd>

namespace mlfd::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kResourceLimit = 3 };

/// Runs the `mlfd` command line. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mlfd::cli
