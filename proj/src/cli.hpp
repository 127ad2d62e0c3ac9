#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ntk::cli {

/// Exit codes shared by all commands.
enum Exit : int { kOk = 0, kError = 1, kNegative = 2 };

/**
 * Runs the command line `args` (without the program name) and returns the exit code.
 * Reports go to `out`, diagnostics to `err`; nothing touches the process streams, so
 * commands can be driven in-process from tests.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace ntk::cli
