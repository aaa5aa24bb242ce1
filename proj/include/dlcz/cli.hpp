#pragma once

#include <ostream>

namespace dlcz {

/// Exit status of the dlcz tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,  ///< bad flags, config or input schema, out-of-domain values
  kExitNumeric = 3,     ///< fit failure, insufficient or degenerate statistics
  kExitIo = 4,
};

/// Entry point of the `dlcz` tool: simulate, estimate, fit-decay, lifetime,
/// budget and repeater-sweep. Reports go to `out`, diagnostics to `err`.
/// Every command writes its files plus `<command>.manifest` to --out
/// (default: $DLCZ_OUT_DIR, else the working directory).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlcz
