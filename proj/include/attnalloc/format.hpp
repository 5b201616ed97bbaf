#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace attnalloc {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace attnalloc
