#pragma once

#include <cstdint>

namespace icmpd {

/// Point of the generalized Arnold map orbit. Both components stay in [0,1).
struct ArnoldState {
    double x = 0.0;
    double y = 0.0;
};

/// One step of the generalized Arnold map with control parameters a, b > 1:
///   x' = x + a*y (mod 1),  y' = b*x + (1 + a*b)*y (mod 1).
/// "mod 1" is the fractional part, mapping negatives into [0,1).
ArnoldState arnold_step(ArnoldState state, double a, double b);

/// One step of the Chebyshev map x' = cos(k * arccos(x)), x in [-1,1].
double chebyshev_step(double x, double k);

/// One step of the Logistic map x' = mu * x * (1 - x), x in (0,1).
/// mu is only required to keep the orbit inside (0,1), i.e. mu in (0,4);
/// chaotic behaviour additionally needs mu > 3.57, which the key generator
/// honours but the validator does not force (published example keys sit
/// below that threshold).
double logistic_step(double x, double mu);

/// Quantize a real orbit value to a byte: floor(1e9 * |x|) mod 256.
std::uint8_t quantize(double x);

}  // namespace icmpd
