// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "p2p/tensor.hpp"

namespace p2p::nn {

// Built-in gradient verification: compares analytic Jacobian-vector products
// (via the backward pass) against central finite differences of the forward
// pass along random directions.
//
// The probed ops are multilinear (conv, upsample) or piecewise linear away
// from kinks (relu), so central differences are exact up to float rounding;
// a power-of-two step keeps the perturbations representable. Inputs must be
// sampled away from relu kinks (|x| > step).
struct FdReport {
    double max_rel_err = 0.0;
    bool pass = false;
    std::string detail;
};

using ForwardFn = std::function<Tensor(const Tensor&)>;
// (input, upstream) -> input gradient
using BackwardFn = std::function<Tensor(const Tensor&, const Tensor&)>;

// step must stay below the distance of any input to a relu kink; larger
// steps reduce float32 rounding in the numeric side and are exact for the
// multilinear and quadratic ops here.
FdReport finite_difference_check(const ForwardFn& forward, const BackwardFn& backward,
                                 const Tensor& x0, double tolerance, uint64_t seed,
                                 float step = 0.03125f);

}  // namespace p2p::nn
