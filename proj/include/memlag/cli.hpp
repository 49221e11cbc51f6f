#pragma once

// =============================================================================
// Command-line driver
// =============================================================================
//   memlag parse FILE                  canonical netlist and diagnostics
//   memlag check FILE... [--jobs N]    self-adjointness report (JSON)
//   memlag simulate FILE --out CSV     time series and iKVL residual
//   memlag drive FILE --element NAME   single-element hysteresis run
// =============================================================================

#include <iosfwd>
#include <string>
#include <vector>

namespace memlag::cli {

enum ExitCode : int { ok = 0, usage = 1, invalid_input = 2, numeric = 3 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace memlag::cli
