#pragma once

#include <iosfwd>

namespace ionstate::cli {

/// Parses arguments, runs one subcommand and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ionstate::cli
