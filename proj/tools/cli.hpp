#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cogverify::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kInputError = 2, kGateViolation = 3 };

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogverify::cli
