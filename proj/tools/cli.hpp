#pragma once

#include <iosfwd>

namespace mlwb::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 1,
  kUsageError = 2,
  kIoError = 3,
};

// Entry point of the mlwb tool; data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace mlwb::cli
