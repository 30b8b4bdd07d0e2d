#pragma once

#include <ostream>

namespace geopitch::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

/// Runs one subcommand. Normal output goes to `out`, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geopitch::cli
