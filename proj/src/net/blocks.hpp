// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "p2p/networks.hpp"
#include "p2p/nn/ops.hpp"
#include "p2p/rng.hpp"

// Internal building blocks shared by the two network definitions.

namespace p2p::net {

struct ConvDef {
    int w = -1, b = -1;
    int stride = 1;
    int pad = 0;
    bool replicate = false;  // edge-replicate padding outside the conv
    bool act_relu = true;
    int cache_slot = -1;
};

struct ConvDef3 {
    int w = -1, b = -1;
    int sd = 1, sh = 1, sw = 1;
    int pd = 0, ph = 0, pw = 0;
    bool act_relu = true;
    int cache_slot = -1;
};

// Registers conv weights with He-uniform init and records the layer spec.
// zero_init overrides the init for head layers, which start training at the
// all-zero output baseline instead of injecting init noise into the loss.
ConvDef add_conv2d(Model& m, Pcg32& rng, const std::string& name, int out_ch, int in_ch, int k,
                   int stride, int pad, bool replicate, bool act_relu, int cache_slot,
                   bool zero_init = false);

ConvDef3 add_conv3d(Model& m, Pcg32& rng, const std::string& name, int out_ch, int in_ch, int kd,
                    int kh, int kw, int sd, int pd, int cache_slot);

Tensor conv2d_block_forward(const Model& m, const ConvDef& d, const Tensor& x, NetCache* cache);
// Accumulates weight/bias grads; returns the block input gradient (empty
// tensor when need_dx is false).
Tensor conv2d_block_backward(Model& m, const ConvDef& d, const NetCache& cache, const Tensor& dy,
                             bool need_dx);

Tensor conv3d_block_forward(const Model& m, const ConvDef3& d, const Tensor& x, NetCache* cache);
Tensor conv3d_block_backward(Model& m, const ConvDef3& d, const NetCache& cache, const Tensor& dy,
                             bool need_dx);

void accumulate(Tensor& dst, const Tensor& src);

}  // namespace p2p::net
