// SPDX-License-Identifier: Apache-2.0
#include <array>

#include "blocks.hpp"
#include "p2p/common.hpp"
#include "p2p/networks.hpp"

namespace p2p {

using net::ConvDef;

namespace {

// Channel plan. The parameter mass sits in the 4x4 middle convs, where each
// weight costs 16 multiplies instead of 1024; that is what keeps a
// 2.5M-parameter network trainable and real-time on a CPU.
constexpr int kE0 = 16;
constexpr int kE1 = 32;
constexpr int kE2 = 64;
constexpr int kD3 = 128;
constexpr int kMid = 320;
constexpr int kProj = 96;
constexpr int kF3 = 64;
constexpr int kF2 = 32;
constexpr int kF1 = 24;
constexpr int kStageCh = 24;
constexpr int kHeat = kNumJoints;
constexpr int kPaf = kNumPafChannels;

Tensor add_tensors(const Tensor& a, const Tensor& b) {
    require_shape(a.same_shape(b), "tensor add shape mismatch");
    Tensor out = a;
    for (int64_t i = 0; i < out.numel(); ++i) out[i] += b[i];
    return out;
}

}  // namespace

struct Depth2Pose::Defs {
    ConvDef e0a, e0b, d1, e1, d2, e2, d3, m1, m2, m3, proj4, f3, f2, f1;
    struct Stage {
        ConvDef fuse;  // unused for stage 0
        ConvDef a, b, heat, paf;
    };
    std::array<Stage, kStages> stages;
    int n_blocks = 0;
};

Depth2Pose::Depth2Pose(uint64_t init_seed) {
    arch_id = "depth2pose-v1";
    Pcg32 rng(derive_seed(init_seed, "d2p-init"));
    auto d = std::make_shared<Defs>();
    int slot = 0;
    auto rconv = [&](const char* name, int out_ch, int in_ch, int k, int stride) {
        return net::add_conv2d(*this, rng, name, out_ch, in_ch, k, stride, k / 2, true, true,
                               slot++);
    };
    auto conv1x1 = [&](const char* name, int out_ch, int in_ch, bool relu) {
        return net::add_conv2d(*this, rng, name, out_ch, in_ch, 1, 1, 0, false, relu, slot++);
    };
    auto head1x1 = [&](const std::string& name, int out_ch, int in_ch) {
        return net::add_conv2d(*this, rng, name, out_ch, in_ch, 1, 1, 0, false, false, slot++,
                               /*zero_init=*/true);
    };

    d->e0a = rconv("e0a", kE0, 1, 3, 1);
    d->e0b = rconv("e0b", kE0, kE0, 3, 1);
    d->d1 = rconv("d1", kE1, kE0, 3, 2);
    d->e1 = rconv("e1", kE1, kE1, 3, 1);
    d->d2 = rconv("d2", kE2, kE1, 3, 2);
    d->e2 = rconv("e2", kE2, kE2, 3, 1);
    d->d3 = rconv("d3", kD3, kE2, 3, 2);
    d->m1 = rconv("m1", kMid, kD3, 3, 1);
    d->m2 = rconv("m2", kMid, kMid, 3, 1);
    d->m3 = rconv("m3", kMid, kMid, 3, 1);
    d->proj4 = conv1x1("proj4", kProj, kMid, true);
    d->f3 = rconv("f3", kF3, kProj + kE2, 3, 1);
    d->f2 = rconv("f2", kF2, kF3 + kE1, 3, 1);
    d->f1 = rconv("f1", kF1, kF2 + kE0, 3, 1);

    for (int s = 0; s < kStages; ++s) {
        const std::string tag = "s" + std::to_string(s);
        Defs::Stage st;
        if (s > 0) {
            st.fuse = conv1x1((tag + ".fuse").c_str(), kStageCh, kF1 + kHeat + kPaf, true);
        }
        st.a = rconv((tag + ".a").c_str(), kStageCh, kStageCh, 3, 1);
        st.b = rconv((tag + ".b").c_str(), kStageCh, kStageCh, 3, 1);
        st.heat = head1x1(tag + ".heat", kHeat, kStageCh);
        st.paf = head1x1(tag + ".paf", kPaf, kStageCh);
        d->stages[static_cast<size_t>(s)] = st;
    }
    d->n_blocks = slot;
    defs_ = std::move(d);
}

std::vector<PoseMaps> Depth2Pose::forward(const Tensor& x, Cache* cache) const {
    require_shape(x.rank() == 4 && x.dim(1) == 1 && x.dim(2) == kSize && x.dim(3) == kSize,
                  "depth2pose: input must be Nx1x32x32, got " + x.shape_str());
    const Defs& d = *defs_;
    if (cache) {
        cache->blocks.assign(static_cast<size_t>(d.n_blocks), BlockCache{});
        cache->extra.clear();
    }

    Tensor a0a = net::conv2d_block_forward(*this, d.e0a, x, cache);
    Tensor a0b = net::conv2d_block_forward(*this, d.e0b, a0a, cache);
    Tensor ad1 = net::conv2d_block_forward(*this, d.d1, a0b, cache);
    Tensor a1 = net::conv2d_block_forward(*this, d.e1, ad1, cache);
    Tensor ad2 = net::conv2d_block_forward(*this, d.d2, a1, cache);
    Tensor a2 = net::conv2d_block_forward(*this, d.e2, ad2, cache);
    Tensor ad3 = net::conv2d_block_forward(*this, d.d3, a2, cache);
    Tensor am = net::conv2d_block_forward(*this, d.m1, ad3, cache);
    am = net::conv2d_block_forward(*this, d.m2, am, cache);
    am = net::conv2d_block_forward(*this, d.m3, am, cache);
    Tensor ap = net::conv2d_block_forward(*this, d.proj4, am, cache);

    Tensor af3 = net::conv2d_block_forward(
        *this, d.f3, nn::concat_channels(nn::upsample2x_forward(ap), a2), cache);
    Tensor af2 = net::conv2d_block_forward(
        *this, d.f2, nn::concat_channels(nn::upsample2x_forward(af3), a1), cache);
    Tensor feat = net::conv2d_block_forward(
        *this, d.f1, nn::concat_channels(nn::upsample2x_forward(af2), a0b), cache);

    std::vector<PoseMaps> heads;
    heads.reserve(kStages);
    for (int s = 0; s < kStages; ++s) {
        const Defs::Stage& st = d.stages[static_cast<size_t>(s)];
        Tensor t;
        if (s == 0) {
            t = feat;
        } else {
            Tensor hp = nn::concat_channels(heads.back().heatmaps, heads.back().pafs);
            t = net::conv2d_block_forward(*this, st.fuse, nn::concat_channels(feat, hp), cache);
        }
        t = net::conv2d_block_forward(*this, st.a, t, cache);
        t = net::conv2d_block_forward(*this, st.b, t, cache);
        PoseMaps pm;
        pm.heatmaps = net::conv2d_block_forward(*this, st.heat, t, cache);
        pm.pafs = net::conv2d_block_forward(*this, st.paf, t, cache);
        heads.push_back(std::move(pm));
    }
    return heads;
}

void Depth2Pose::backward(const Cache& cache, const std::vector<PoseMaps>& d_heads) {
    require_shape(d_heads.size() == kStages, "depth2pose backward: need one grad per stage");
    const Defs& d = *defs_;

    Tensor d_feat;  // accumulated across stages
    Tensor dh_next, dp_next;  // gradients flowing into the previous stage's heads

    for (int s = kStages - 1; s >= 0; --s) {
        const Defs::Stage& st = d.stages[static_cast<size_t>(s)];
        Tensor dh = d_heads[static_cast<size_t>(s)].heatmaps;
        Tensor dp = d_heads[static_cast<size_t>(s)].pafs;
        if (dh_next.numel() > 0) dh = add_tensors(dh, dh_next);
        if (dp_next.numel() > 0) dp = add_tensors(dp, dp_next);

        Tensor dt = add_tensors(net::conv2d_block_backward(*this, st.heat, cache, dh, true),
                                net::conv2d_block_backward(*this, st.paf, cache, dp, true));
        dt = net::conv2d_block_backward(*this, st.b, cache, dt, true);
        dt = net::conv2d_block_backward(*this, st.a, cache, dt, true);

        if (s == 0) {
            d_feat = d_feat.numel() > 0 ? add_tensors(d_feat, dt) : dt;
            dh_next = Tensor();
            dp_next = Tensor();
        } else {
            Tensor d_in = net::conv2d_block_backward(*this, st.fuse, cache, dt, true);
            Tensor df, dhp;
            nn::concat_channels_backward(d_in, kF1, df, dhp);
            d_feat = d_feat.numel() > 0 ? add_tensors(d_feat, df) : df;
            nn::concat_channels_backward(dhp, kHeat, dh_next, dp_next);
        }
    }

    // Decoder.
    Tensor d_cat32 = net::conv2d_block_backward(*this, d.f1, cache, d_feat, true);
    Tensor d_u32, d_a0b_skip;
    nn::concat_channels_backward(d_cat32, kF2, d_u32, d_a0b_skip);
    Tensor d_af2 = nn::upsample2x_backward(d_u32);

    Tensor d_cat16 = net::conv2d_block_backward(*this, d.f2, cache, d_af2, true);
    Tensor d_u16, d_a1_skip;
    nn::concat_channels_backward(d_cat16, kF3, d_u16, d_a1_skip);
    Tensor d_af3 = nn::upsample2x_backward(d_u16);

    Tensor d_cat8 = net::conv2d_block_backward(*this, d.f3, cache, d_af3, true);
    Tensor d_u8, d_a2_skip;
    nn::concat_channels_backward(d_cat8, kProj, d_u8, d_a2_skip);
    Tensor d_ap = nn::upsample2x_backward(d_u8);

    // Middle and encoder.
    Tensor g = net::conv2d_block_backward(*this, d.proj4, cache, d_ap, true);
    g = net::conv2d_block_backward(*this, d.m3, cache, g, true);
    g = net::conv2d_block_backward(*this, d.m2, cache, g, true);
    g = net::conv2d_block_backward(*this, d.m1, cache, g, true);
    g = net::conv2d_block_backward(*this, d.d3, cache, g, true);

    g = add_tensors(g, d_a2_skip);
    g = net::conv2d_block_backward(*this, d.e2, cache, g, true);
    g = net::conv2d_block_backward(*this, d.d2, cache, g, true);

    g = add_tensors(g, d_a1_skip);
    g = net::conv2d_block_backward(*this, d.e1, cache, g, true);
    g = net::conv2d_block_backward(*this, d.d1, cache, g, true);

    g = add_tensors(g, d_a0b_skip);
    g = net::conv2d_block_backward(*this, d.e0b, cache, g, true);
    net::conv2d_block_backward(*this, d.e0a, cache, g, false);
}

PoseMaps infer_pose_maps(const Depth2Pose& model, const Tensor& depth32, const SensorConfig& cfg) {
    Tensor x({1, 1, 32, 32});
    require_shape(depth32.numel() == 1024, "infer_pose_maps: depth map must be 32x32");
    const float scale = 1.0f / static_cast<float>(cfg.crop_range_m());
    for (int64_t i = 0; i < 1024; ++i) x[i] = depth32[i] * scale;
    std::vector<PoseMaps> heads = model.forward(x);
    return std::move(heads.back());
}

}  // namespace p2p
