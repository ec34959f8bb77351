#include "icmpd/chaos.hpp"

#include <cmath>
#include <stdexcept>

namespace icmpd {

namespace {

// Fractional part mapped into [0,1). Guards the rounding edge where
// x - floor(x) lands exactly on 1.0 for tiny negative x.
double mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) {
        r -= 1.0;
    }
    if (r < 0.0) {
        r = 0.0;
    }
    return r;
}

}  // namespace

ArnoldState arnold_step(ArnoldState state, double a, double b) {
    if (!std::isfinite(state.x) || !std::isfinite(state.y)) {
        throw std::invalid_argument("arnold_step: non-finite state");
    }
    if (state.x < 0.0 || state.x >= 1.0 || state.y < 0.0 || state.y >= 1.0) {
        throw std::invalid_argument("arnold_step: state outside [0,1)");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 1.0 || b <= 1.0) {
        throw std::invalid_argument("arnold_step: parameters must satisfy a > 1, b > 1");
    }
    // Evaluation order is fixed; the build disables FP contraction so the
    // orbit is reproducible between encryptor and decryptor.
    ArnoldState next;
    next.x = mod1(state.x + a * state.y);
    next.y = mod1(b * state.x + (1.0 + a * b) * state.y);
    return next;
}

double chebyshev_step(double x, double k) {
    if (!std::isfinite(x) || x < -1.0 || x > 1.0) {
        throw std::invalid_argument("chebyshev_step: x outside [-1,1]");
    }
    if (!std::isfinite(k)) {
        throw std::invalid_argument("chebyshev_step: non-finite k");
    }
    return std::cos(k * std::acos(x));
}

double logistic_step(double x, double mu) {
    if (!std::isfinite(x) || x <= 0.0 || x >= 1.0) {
        throw std::invalid_argument("logistic_step: x outside (0,1)");
    }
    if (!std::isfinite(mu) || mu <= 0.0 || mu >= 4.0) {
        throw std::invalid_argument("logistic_step: mu outside (0,4)");
    }
    return mu * x * (1.0 - x);
}

std::uint8_t quantize(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("quantize: non-finite input");
    }
    const double scaled = std::floor(1e9 * std::fabs(x));
    if (scaled < 9007199254740992.0) {  // exactly representable range
        return static_cast<std::uint8_t>(static_cast<std::uint64_t>(scaled) & 0xFF);
    }
    return static_cast<std::uint8_t>(std::fmod(scaled, 256.0));
}

}  // namespace icmpd
