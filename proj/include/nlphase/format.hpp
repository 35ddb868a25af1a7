#pragma once

#include <string>
#include <string_view>

namespace nlphase {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// Strict parse of a whole token; throws InputError on trailing garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace nlphase
