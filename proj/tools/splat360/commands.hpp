// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace splat360::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitArgument = 2,
    kExitFormat = 3,
    kExitNumeric = 4,
    kExitCheck = 5,
};

/// Runs one CLI invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace splat360::cli
