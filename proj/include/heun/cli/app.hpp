#ifndef HEUN_CLI_APP_HPP
#define HEUN_CLI_APP_HPP

#include "heun/cli/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace heun::cli {

/// Parsed command line. `help` holds the text to print when --help was given.
struct ParsedArgs {
  RunConfig config;
  std::optional<std::string> help;
};

/// Flags override config-file values. Throws UsageError on anything malformed.
ParsedArgs parse_command_line(int argc, const char* const* argv);

/// The whole tool: parse, run, write the report. Returns the exit status
/// (0 pass, 1 verification failure, 2 usage or config error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heun::cli

#endif  // HEUN_CLI_APP_HPP
