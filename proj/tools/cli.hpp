#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adbl2::cli {

/// Exit codes of the adbl2 tool.
enum ExitCode : int {
    kSuccess = 0,
    kFindings = 1,  // e.g. verify found a mismatch
    kUsage = 2,
    kFailure = 3,   // I/O, parse or backend failure
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adbl2::cli
