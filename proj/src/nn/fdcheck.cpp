// SPDX-License-Identifier: Apache-2.0
#include "p2p/nn/fdcheck.hpp"

#include <cmath>
#include <vector>

#include "p2p/rng.hpp"

namespace p2p::nn {

// Probes the Jacobian along random directions: for upstream u and direction
// v, dot(backward(x, u), v) must equal the central difference of
// dot(forward(x +- h v), u). Both sides exercise every element of the
// Jacobian with healthy magnitudes, which keeps float32 rounding far below
// the tolerance.
FdReport finite_difference_check(const ForwardFn& forward, const BackwardFn& backward,
                                 const Tensor& x0, double tolerance, uint64_t seed, float step) {
    const float kStep = step;
    constexpr int kProbes = 8;

    Tensor y0 = forward(x0);
    Pcg32 rng(seed);
    auto random_signed = [&rng](const Tensor& like) {
        Tensor t = Tensor::zeros_like(like);
        for (int64_t i = 0; i < t.numel(); ++i) {
            float mag = rng.uniform_f(0.25f, 1.0f);
            t[i] = rng.next_u32() & 1u ? mag : -mag;
        }
        return t;
    };

    // Collect all probes first: the error is judged relative to the probe
    // scale of the operator, not to an individual projection that may be
    // accidentally tiny.
    std::vector<double> analytic(kProbes), numeric(kProbes);
    double scale = 0.0;
    for (int probe = 0; probe < kProbes; ++probe) {
        Tensor upstream = random_signed(y0);
        Tensor direction = random_signed(x0);

        Tensor grad = backward(x0, upstream);
        require_shape(grad.same_shape(x0), "fdcheck: backward returned wrong shape");
        double a = 0.0;
        for (int64_t i = 0; i < x0.numel(); ++i)
            a += static_cast<double>(grad[i]) * direction[i];

        Tensor xp = x0, xm = x0;
        for (int64_t i = 0; i < x0.numel(); ++i) {
            xp[i] += kStep * direction[i];
            xm[i] -= kStep * direction[i];
        }
        Tensor yp = forward(xp);
        Tensor ym = forward(xm);
        double sp = 0.0, sm = 0.0;
        for (int64_t j = 0; j < y0.numel(); ++j) {
            sp += static_cast<double>(yp[j]) * upstream[j];
            sm += static_cast<double>(ym[j]) * upstream[j];
        }
        analytic[static_cast<size_t>(probe)] = a;
        numeric[static_cast<size_t>(probe)] = (sp - sm) / (2.0 * kStep);
        scale = std::max({scale, std::fabs(a), std::fabs(numeric[static_cast<size_t>(probe)])});
    }

    FdReport rep;
    scale = std::max(scale, 1e-6);
    for (int probe = 0; probe < kProbes; ++probe) {
        const double rel =
            std::fabs(numeric[static_cast<size_t>(probe)] - analytic[static_cast<size_t>(probe)]) /
            scale;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.detail = "probe " + std::to_string(probe) + ": analytic " +
                         std::to_string(analytic[static_cast<size_t>(probe)]) + " vs numeric " +
                         std::to_string(numeric[static_cast<size_t>(probe)]);
        }
    }
    rep.pass = rep.max_rel_err < tolerance;
    return rep;
}

}  // namespace p2p::nn
