#pragma once

#include <iosfwd>

namespace accum::cli {

enum ExitCode : int { ok = 0, usage = 2, data = 3, nonconvergence = 4 };

/// Runs one subcommand; tables go to `out`, JSON error objects and warnings
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace accum::cli
