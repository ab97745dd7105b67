#pragma once

#include <cstdio>
#include <string>

namespace qubus {

/// Fixed 17-significant-digit rendering used by every CSV and log writer.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qubus
