#include "ngpon/format.hpp"

#include <cmath>
#include <cstdio>

namespace ngpon {

std::string fmt_sig(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string exact_rational(double x, long long max_den)
{
    if (!std::isfinite(x)) return {};
    const bool neg = x < 0;
    const double ax = std::fabs(x);
    if (ax > 9e15) return {};
    // Continued-fraction convergents; accept the first that matches x to 1e-12 relative
    // (bounds come out of summed loads and carry a few ulps of rounding).
    long double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    long double r = ax;
    for (int it = 0; it < 64; ++it) {
        const long double a = std::floor(r);
        const long double h2 = a * h1 + h0;
        const long double k2 = a * k1 + k0;
        if (k2 > static_cast<long double>(max_den)) break;
        if (std::fabs(static_cast<double>(h2 / k2) - ax) <= 1e-12 * ax) {
            char buf[96];
            if (k2 == 1)
                std::snprintf(buf, sizeof buf, "%s%.0Lf", neg ? "-" : "", h2);
            else
                std::snprintf(buf, sizeof buf, "%s%.0Lf/%.0Lf", neg ? "-" : "", h2, k2);
            return buf;
        }
        const long double frac = r - a;
        if (frac == 0) break;
        r = 1 / frac;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    return {};
}

} // namespace ngpon
