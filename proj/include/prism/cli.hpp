#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prism::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kInputError = 2;
inline constexpr int kPipelineError = 3;

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prism::cli
