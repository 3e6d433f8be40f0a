#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aptsp {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitBudget = 2, kExitInfeasible = 3 };

/// Runs the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aptsp
