#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peakon::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIntegrationFailure = 2,
  kBudgetExceeded = 3,
  kVerifyFailed = 4,
};

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peakon::cli
