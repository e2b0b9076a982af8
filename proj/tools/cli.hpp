#pragma once

#include <iosfwd>

namespace sgp::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

/// Entry point of the `sgp` command. Data and reports go to `out` unless
/// --out is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgp::cli
