#pragma once

#include <string>
#include <string_view>

namespace transdyn {

/// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(std::string_view value);

/// Shortest decimal text that round-trips the double.
std::string format_real(double value);

}  // namespace transdyn
