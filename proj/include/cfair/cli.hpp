#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfair::cli {

/// Process exit codes.
enum ExitCode : int {
  kFair = 0,            // also: success for derive/closure/parse/verify-proof
  kUnfair = 1,          // also: verify-proof rejected the proof
  kNotCounterfactual = 2,
  kConfigError = 3,     // parse errors, bad flags, unreadable/unwritable files
  kOracleError = 4,
};

/// Entry point of the `cfair` tool. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfair::cli
