#pragma once

#include <charconv>
#include <string>

namespace odcube {

// Shortest text that parses back to the same double.
inline std::string format_number(double const v) {
  char buf[32];
  auto const r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}

}  // namespace odcube
