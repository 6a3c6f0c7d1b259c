#include "radarbias/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace radarbias {

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double round_digits(double v, int digits) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v, digits).c_str(), nullptr);
}

}  // namespace radarbias
