#pragma once

#include <string>
#include <string_view>

namespace hybridode {

/// Decimal with 17 significant digits; parses back
/// to the identical double.
std::string format_real(double v);
/// Throws ConfigError unless the whole string is a number.
double parse_real(std::string_view s);

}  // namespace hybridode
