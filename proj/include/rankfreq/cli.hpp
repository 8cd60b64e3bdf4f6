#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rankfreq {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitInsufficientData = 2,
};

// Runs one invocation. args[0] is the program name. Primary output goes to
// `out` unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankfreq
