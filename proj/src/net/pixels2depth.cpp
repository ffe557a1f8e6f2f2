// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "blocks.hpp"
#include "p2p/common.hpp"
#include "p2p/networks.hpp"

namespace p2p {

using net::ConvDef;
using net::ConvDef3;

// Channel plan: three temporally strided 3D convs (kernel 7x3x3) collapse
// 100 bins to a 4x4 feature map, then three upsample+conv blocks reach
// 32x32. 358,255 parameters.
struct Pixels2Depth::Defs {
    ConvDef3 c1, c2, c3;
    ConvDef d1, d2, d3, head;
    int n_blocks = 7;
    // extra slots: 0 = reshaped features, 1..3 = upsample outputs
    enum Extra { kReshaped = 0, kUp1, kUp2, kUp3, kNumExtra };
};

Pixels2Depth::Pixels2Depth(uint64_t init_seed) {
    arch_id = "pixels2depth-v1";
    Pcg32 rng(derive_seed(init_seed, "p2d-init"));
    auto d = std::make_shared<Defs>();
    // 100 -> 25 -> 6 -> 1 along the time axis.
    d->c1 = net::add_conv3d(*this, rng, "c1", 24, 1, 7, 3, 3, /*sd=*/4, /*pd=*/2, 0);
    d->c2 = net::add_conv3d(*this, rng, "c2", 44, 24, 7, 3, 3, 4, 2, 1);
    d->c3 = net::add_conv3d(*this, rng, "c3", 88, 44, 7, 3, 3, 4, 1, 2);
    d->d1 = net::add_conv2d(*this, rng, "d1", 44, 88, 3, 1, 1, false, true, 3);
    d->d2 = net::add_conv2d(*this, rng, "d2", 22, 44, 3, 1, 1, false, true, 4);
    d->d3 = net::add_conv2d(*this, rng, "d3", 12, 22, 3, 1, 1, false, true, 5);
    d->head = net::add_conv2d(*this, rng, "head", 1, 12, 3, 1, 1, false, false, 6,
                              /*zero_init=*/true);
    // Head bias starts at mid working range; a scalar bias moves roughly one
    // learning rate per Adam step, so starting at zero wastes whole epochs.
    params[static_cast<size_t>(d->head.b)].value.fill(0.94f);
    defs_ = std::move(d);
}

Tensor Pixels2Depth::forward(const Tensor& x, Cache* cache) const {
    require_shape(x.rank() == 5 && x.dim(1) == 1 && x.dim(2) == kBins && x.dim(3) == kGrid &&
                      x.dim(4) == kGrid,
                  "pixels2depth: input must be Nx1x100x4x4, got " + x.shape_str());
    const Defs& d = *defs_;
    if (cache) {
        cache->blocks.assign(static_cast<size_t>(d.n_blocks), BlockCache{});
        cache->extra.assign(Defs::kNumExtra, Tensor());
    }
    const int64_t N = x.dim(0);

    Tensor a1 = net::conv3d_block_forward(*this, d.c1, x, cache);
    Tensor a2 = net::conv3d_block_forward(*this, d.c2, a1, cache);
    Tensor a3 = net::conv3d_block_forward(*this, d.c3, a2, cache);  // N x 88 x 1 x 4 x 4

    Tensor r = a3.reshaped({N, 88, kGrid, kGrid});
    if (cache) cache->extra[Defs::kReshaped] = r;

    Tensor u1 = nn::upsample2x_forward(r);  // 8x8
    if (cache) cache->extra[Defs::kUp1] = u1;
    Tensor a4 = net::conv2d_block_forward(*this, d.d1, u1, cache);

    Tensor u2 = nn::upsample2x_forward(a4);  // 16x16
    if (cache) cache->extra[Defs::kUp2] = u2;
    Tensor a5 = net::conv2d_block_forward(*this, d.d2, u2, cache);

    Tensor u3 = nn::upsample2x_forward(a5);  // 32x32
    if (cache) cache->extra[Defs::kUp3] = u3;
    Tensor a6 = net::conv2d_block_forward(*this, d.d3, u3, cache);

    return net::conv2d_block_forward(*this, d.head, a6, cache);
}

void Pixels2Depth::backward(const Cache& cache, const Tensor& dy) {
    const Defs& d = *defs_;
    Tensor g = net::conv2d_block_backward(*this, d.head, cache, dy, true);
    g = net::conv2d_block_backward(*this, d.d3, cache, g, true);
    g = nn::upsample2x_backward(g);
    g = net::conv2d_block_backward(*this, d.d2, cache, g, true);
    g = nn::upsample2x_backward(g);
    g = net::conv2d_block_backward(*this, d.d1, cache, g, true);
    g = nn::upsample2x_backward(g);  // N x 88 x 4 x 4

    Tensor g3 = g.reshaped({g.dim(0), 88, 1, kGrid, kGrid});
    g3 = net::conv3d_block_backward(*this, d.c3, cache, g3, true);
    g3 = net::conv3d_block_backward(*this, d.c2, cache, g3, true);
    net::conv3d_block_backward(*this, d.c1, cache, g3, false);
}

Tensor histogram_to_input(const Histogram& h) {
    require_shape(h.grid_x == 4 && h.grid_y == 4 && h.n_bins == 100,
                  "histogram_to_input expects a 4x4x100 histogram");
    Tensor x({1, 1, 100, 4, 4});
    uint16_t max_count = 0;
    for (uint16_t c : h.counts) max_count = std::max(max_count, c);
    const float scale = max_count > 0 ? 1.0f / static_cast<float>(max_count) : 0.0f;
    // File layout is (y, x, bin); the network wants (bin, y, x).
    for (int y = 0; y < 4; ++y)
        for (int xpix = 0; xpix < 4; ++xpix)
            for (int b = 0; b < 100; ++b)
                x[(static_cast<int64_t>(b) * 4 + y) * 4 + xpix] =
                    static_cast<float>(h.at(xpix, y, b)) * scale;
    return x;
}

Tensor infer_depth(const Pixels2Depth& model, const Histogram& h, const SensorConfig& cfg) {
    Tensor x = histogram_to_input(h);
    Tensor y = model.forward(x);
    const float hi = static_cast<float>(cfg.crop_range_m());
    Tensor out({32, 32});
    for (int64_t i = 0; i < 1024; ++i) out[i] = std::clamp(y[i], 0.0f, hi);
    return out;
}

}  // namespace p2p
