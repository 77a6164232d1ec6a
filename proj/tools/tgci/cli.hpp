#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tgci::cli {

/// Exit codes: 0 success, 1 failed run or findings, 2 bad usage.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tgci::cli
