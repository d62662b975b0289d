#include "psiest/format.hpp"

#include <charconv>
#include <cstdio>

namespace psiest {

std::string shortest_repr(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string repr17(double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace psiest
