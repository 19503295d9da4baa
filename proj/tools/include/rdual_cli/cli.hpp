#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rdual::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kTolerance = 3,
  kInternal = 4,
};

/// Runs the rdual command line with argv[0] omitted. Human-readable output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rdual::cli
