#pragma once

#include <cstdio>
#include <string>

namespace conefp {

/// Shortest-safe round-trip text for a double: 17 significant digits.
inline std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Human-facing text: 6 significant digits.
inline std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace conefp
