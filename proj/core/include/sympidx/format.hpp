#pragma once

#include <cstdio>
#include <string>

namespace sympidx {

// Deterministic float formatting for CSV/JSON artifacts.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace sympidx
