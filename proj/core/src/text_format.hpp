#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace iocforge::detail {

// %.17g round-trips every finite double exactly; NaN is normalized to a
// fixed literal so artifacts stay byte-stable.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace iocforge::detail
