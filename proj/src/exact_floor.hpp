#pragma once

#include <cmath>
#include <cstdint>

#include "curvespec/curve.hpp"

namespace curvespec::detail {

// floor(t * scale) evaluated exactly for finite t >= 0 and scale < 2^63.
// t = m 2^e with integer m < 2^53, so the product m * scale fits in 128 bits.
inline Index floor_scaled(double t, Index scale) {
    if (t == 0.0) return 0;
    int exp2 = 0;
    const double frac = std::frexp(t, &exp2);
    const auto mantissa = static_cast<__int128>(std::ldexp(frac, 53));
    const int shift = exp2 - 53;
    const __int128 product = mantissa * static_cast<__int128>(scale);
    if (shift >= 0) return static_cast<Index>(product << shift);
    if (-shift >= 127) return 0;
    return static_cast<Index>(product >> (-shift));
}

}  // namespace curvespec::detail
