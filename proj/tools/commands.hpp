#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opal::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kDataError = 3,
    kAcceptanceFailure = 4,
};

/// Runs the `opal` command line. `args` excludes the program name. Human
/// readable results go to `out`, the resolved configuration and diagnostics
/// to `log`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

} // namespace opal::cli
