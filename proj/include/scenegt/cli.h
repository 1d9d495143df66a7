#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scenegt::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kMetricUndefined = 3,
};

// Runs one invocation; args exclude the program name. Log lines go to `log`,
// reports requested with --format go to `out`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace scenegt::cli
