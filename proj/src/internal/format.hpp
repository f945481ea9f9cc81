#pragma once

#include <cstdio>
#include <string>

namespace jumpsl::internal {

/// 17 significant digits, '.' separator.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace jumpsl::internal
