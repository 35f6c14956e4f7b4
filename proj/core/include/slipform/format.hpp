#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace slipform {

/// 17 significant digits (lossless for doubles); "+inf", "-inf", "nan".
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace slipform
