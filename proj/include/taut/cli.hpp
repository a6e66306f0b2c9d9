#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taut::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kMathError = 2, kValidationFailure = 3 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out` (or the --output file), one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taut::cli
