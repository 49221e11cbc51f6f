#pragma once

#include <string>

namespace memlag {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_real(double x);

/// Fixed 17-significant-digit text, used for CSV output.
std::string format_real17(double x);

} // namespace memlag
