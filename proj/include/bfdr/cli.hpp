#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfdr::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kNumericalError = 3,
};

/// Runs the `bfdr` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bfdr::cli
