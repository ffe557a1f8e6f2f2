// SPDX-License-Identifier: Apache-2.0
#include "p2p/rng.hpp"

#include <cmath>

namespace p2p {

namespace {

// lgamma is not guaranteed reentrant everywhere; use a local Stirling-series
// log-factorial good to ~1e-10 for k >= 10 (exact table below that).
double log_factorial(uint32_t k) {
    static const double table[10] = {0.0,
                                     0.0,
                                     0.6931471805599453,
                                     1.791759469228055,
                                     3.1780538303479458,
                                     4.787491742782046,
                                     6.579251212010101,
                                     8.525161361065415,
                                     10.60460290274525,
                                     12.801827480081469};
    if (k < 10) return table[k];
    double x = k + 1.0;
    double inv = 1.0 / x;
    double inv2 = inv * inv;
    return (x - 0.5) * std::log(x) - x + 0.9189385332046727 +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

}  // namespace

uint32_t Pcg32::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 30.0) {
        // Knuth: count uniforms until their product drops below exp(-lambda).
        double limit = std::exp(-lambda);
        double prod = next_double();
        uint32_t k = 0;
        while (prod > limit) {
            prod *= next_double();
            ++k;
        }
        return k;
    }
    // PTRS transformed rejection; exact for lambda >= ~10.
    double b = 0.931 + 2.53 * std::sqrt(lambda);
    double a = -0.059 + 0.02483 * b;
    double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double v_r = 0.9277 - 3.6224 / (b - 2.0);
    double log_lambda = std::log(lambda);
    for (;;) {
        double u = next_double() - 0.5;
        double v = next_double();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (kf < 0.0) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<uint32_t>(kf);
        if (us < 0.013 && v > us) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - log_factorial(static_cast<uint32_t>(kf))) {
            return static_cast<uint32_t>(kf);
        }
    }
}

}  // namespace p2p
