#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ineqgcc::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
  kAccept = 0,
  kReject = 1,
  kInputError = 2,
  kNumericalFailure = 3,
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ineqgcc::cli
