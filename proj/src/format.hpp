#pragma once

#include <cstdio>
#include <string>

namespace phasesync::detail {

// 17 significant digits round-trips any double.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace phasesync::detail
