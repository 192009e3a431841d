#ifndef TREELIKE_TOOLS_CLI_HPP
#define TREELIKE_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace treelike::tools {

enum ExitCode : int { Success = 0, RuntimeFailure = 1, UsageError = 2 };

/// Parses `args` (without the program name), runs the subcommand and writes
/// CSV files into --out.  Messages go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treelike::tools

#endif
