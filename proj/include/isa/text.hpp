#pragma once

#include <optional>
#include <string>

namespace isa {

/// Fixed-point with six decimals, '.' separator regardless of locale.
/// Values that round to zero print as "0.000000" (never "-0.000000").
std::string format_fixed(double value);

/// Like format_fixed, but an empty string for a missing value.
std::string format_fixed(const std::optional<double>& value);

/// Shortest round-trip representation, used for configuration echoes.
std::string format_general(double value);

}  // namespace isa
