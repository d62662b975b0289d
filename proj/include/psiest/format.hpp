#pragma once

#include <string>

namespace psiest {

/// Shortest decimal text that round-trips to the same double.
std::string shortest_repr(double value);

/// printf("%.17g"); "null"-free, callers handle non-finite values.
std::string repr17(double value);

}  // namespace psiest
