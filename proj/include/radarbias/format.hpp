#pragma once

#include <string>

namespace radarbias {

/// "%.<digits>g" rendering; NaN prints as "nan" and infinities as "inf"/"-inf".
std::string format_number(double v, int digits = 6);

/// v rounded to the given number of significant digits.
double round_digits(double v, int digits);
inline double round6(double v) { return round_digits(v, 6); }

}  // namespace radarbias
