#pragma once

#include <iosfwd>

namespace nvkin::cli {

/// Parses arguments and runs one subcommand. Data goes to `out` unless
/// --output names a file; diagnostics go to `err`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvkin::cli
