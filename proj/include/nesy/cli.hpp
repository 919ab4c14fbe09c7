#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nesy {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_parse = 2, exit_computation = 3 };

/// Runs one invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nesy
