#ifndef ATML_CLI_HPP
#define ATML_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace atml::cli {

/// Exit codes: 0 all passed / valid, 1 at least one test failed,
/// 2 validation violations, 3 usage / I/O / resolution error.
enum ExitStatus : int {
    kOk = 0,
    kTestFailed = 1,
    kValidationFailed = 2,
    kUsageOrIoError = 3,
};

/// Runs `atmlml <subcommand> ...` against the given streams. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace atml::cli

#endif
