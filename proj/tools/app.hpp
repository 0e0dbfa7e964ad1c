#pragma once

#include <iosfwd>

namespace fit2::cli
{

/// Parses arguments and dispatches a subcommand. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fit2::cli
