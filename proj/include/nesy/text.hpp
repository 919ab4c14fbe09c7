#pragma once

#include <cstdio>
#include <span>
#include <string>

namespace nesy {

/// 12 significant digits, the precision of every numeric text output.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string join_reals(std::span<const double> xs, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_real(xs[i]);
  }
  return out;
}

}  // namespace nesy
