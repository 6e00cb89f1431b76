#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vulnprio/cli/run_config.hpp"

namespace vulnprio::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitTraining = 3,
    kExitModel = 4,
    kExitScoring = 5,
};

/// Runs one command line (without the program name). Prompts for `label`
/// are read from `in`; results go to `out` unless an output path is
/// configured; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_environment());

}  // namespace vulnprio::cli
