#pragma once

#include <string>

namespace ngpon {

// Fixed 9-significant-digit rendering used by every CSV writer.
std::string fmt_sig(double x);

// "p/q" when x is a ratio with q <= max_den (to 1e-12 relative), empty otherwise.
std::string exact_rational(double x, long long max_den = 1000000);

} // namespace ngpon
