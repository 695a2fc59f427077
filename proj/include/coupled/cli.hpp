#ifndef COUPLED_CLI_HPP
#define COUPLED_CLI_HPP

#include <string>
#include <vector>

namespace coupled {

/// Exit codes of the batch front end.
enum ExitCode : int
{
   exit_ok = 0,
   exit_error = 1,
   exit_violations = 2,
};

/// `coupled-point <subcommand> --config <path> [--out <dir>] [--seed <int>]`
///
/// Subcommands: validate, solve-abstract, solve-bvp, verify-conditions,
/// verify-oracle. Writes report.json (and trace.csv for iterating modes) into
/// the output directory. Returns 0 on success, 2 when a hypothesis verifier
/// found violations, 1 on errors.
int run_cli(int argc, char **argv);

/// Same as above with the arguments after the program name.
int run_cli(const std::vector<std::string> &args);

} // namespace coupled

#endif
