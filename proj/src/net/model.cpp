// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "blocks.hpp"
#include "p2p/common.hpp"

namespace p2p {

std::string Model::summary() const {
    std::ostringstream os;
    os << arch_id << ": " << param_count() << " parameters, " << layers.size() << " layers\n";
    for (const LayerSpec& l : layers) {
        os << "  " << l.name << " " << l.kind;
        if (!l.weight_shape.empty()) {
            os << " [";
            for (size_t i = 0; i < l.weight_shape.size(); ++i) {
                if (i) os << "x";
                os << l.weight_shape[i];
            }
            os << "]";
        }
        if (l.stride != 1) os << " s" << l.stride;
        if (l.pad != 0) os << " p" << l.pad;
        if (!l.note.empty()) os << " (" << l.note << ")";
        os << "\n";
    }
    return os.str();
}

void TrainConfig::validate() const {
    require(lr > 0.0f && batch_size > 0 && epochs > 0, "train config values must be positive");
    require(w_depth > 0.0f && w_heatmap > 0.0f && w_paf > 0.0f, "loss weights must be positive");
}

namespace net {

namespace {

void he_uniform(Tensor& t, int64_t fan_in, Pcg32& rng) {
    const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform_f(-bound, bound);
}

}  // namespace

ConvDef add_conv2d(Model& m, Pcg32& rng, const std::string& name, int out_ch, int in_ch, int k,
                   int stride, int pad, bool replicate, bool act_relu, int cache_slot,
                   bool zero_init) {
    Tensor w({out_ch, in_ch, k, k});
    if (!zero_init) he_uniform(w, static_cast<int64_t>(in_ch) * k * k, rng);
    ConvDef d;
    d.w = static_cast<int>(m.params.size());
    m.params.emplace_back(name + ".w", std::move(w));
    d.b = static_cast<int>(m.params.size());
    m.params.emplace_back(name + ".b", Tensor({out_ch}));
    d.stride = stride;
    d.pad = pad;
    d.replicate = replicate;
    d.act_relu = act_relu;
    d.cache_slot = cache_slot;

    LayerSpec spec;
    spec.name = name;
    spec.kind = "conv2d";
    spec.weight_shape = {out_ch, in_ch, k, k};
    spec.stride = stride;
    spec.pad = pad;
    spec.note = std::string(replicate ? "replicate-pad" : "zero-pad") + (act_relu ? ", relu" : "");
    m.layers.push_back(spec);
    return d;
}

ConvDef3 add_conv3d(Model& m, Pcg32& rng, const std::string& name, int out_ch, int in_ch, int kd,
                    int kh, int kw, int sd, int pd, int cache_slot) {
    Tensor w({out_ch, in_ch, kd, kh, kw});
    he_uniform(w, static_cast<int64_t>(in_ch) * kd * kh * kw, rng);
    ConvDef3 d;
    d.w = static_cast<int>(m.params.size());
    m.params.emplace_back(name + ".w", std::move(w));
    d.b = static_cast<int>(m.params.size());
    m.params.emplace_back(name + ".b", Tensor({out_ch}));
    d.sd = sd;
    d.sh = d.sw = 1;
    d.pd = pd;
    d.ph = kh / 2;
    d.pw = kw / 2;
    d.cache_slot = cache_slot;

    LayerSpec spec;
    spec.name = name;
    spec.kind = "conv3d";
    spec.weight_shape = {out_ch, in_ch, kd, kh, kw};
    spec.stride = sd;
    spec.pad = pd;
    spec.note = "zero-pad, relu";
    m.layers.push_back(spec);
    return d;
}

Tensor conv2d_block_forward(const Model& m, const ConvDef& d, const Tensor& x, NetCache* cache) {
    Tensor xin = d.replicate ? nn::pad2d_replicate_forward(x, d.pad) : x;
    const int conv_pad = d.replicate ? 0 : d.pad;
    Tensor z = nn::conv2d_forward(xin, m.params[static_cast<size_t>(d.w)].value,
                                  m.params[static_cast<size_t>(d.b)].value, d.stride, conv_pad);
    Tensor y = d.act_relu ? nn::relu_forward(z) : z;
    if (cache) {
        cache->blocks[static_cast<size_t>(d.cache_slot)].xin = std::move(xin);
        cache->blocks[static_cast<size_t>(d.cache_slot)].z = std::move(z);
    }
    return y;
}

Tensor conv2d_block_backward(Model& m, const ConvDef& d, const NetCache& cache, const Tensor& dy,
                             bool need_dx) {
    const BlockCache& c = cache.blocks[static_cast<size_t>(d.cache_slot)];
    Tensor dz = d.act_relu ? nn::relu_backward(c.z, dy) : dy;
    const int conv_pad = d.replicate ? 0 : d.pad;
    nn::Conv2dGrads g = nn::conv2d_backward(c.xin, m.params[static_cast<size_t>(d.w)].value, dz,
                                            d.stride, conv_pad, need_dx);
    accumulate(m.params[static_cast<size_t>(d.w)].grad, g.dw);
    accumulate(m.params[static_cast<size_t>(d.b)].grad, g.db);
    if (!need_dx) return Tensor();
    return d.replicate ? nn::pad2d_replicate_backward(g.dx, d.pad) : std::move(g.dx);
}

Tensor conv3d_block_forward(const Model& m, const ConvDef3& d, const Tensor& x, NetCache* cache) {
    Tensor z = nn::conv3d_forward(x, m.params[static_cast<size_t>(d.w)].value,
                                  m.params[static_cast<size_t>(d.b)].value, d.sd, d.sh, d.sw, d.pd,
                                  d.ph, d.pw);
    Tensor y = d.act_relu ? nn::relu_forward(z) : z;
    if (cache) {
        cache->blocks[static_cast<size_t>(d.cache_slot)].xin = x;
        cache->blocks[static_cast<size_t>(d.cache_slot)].z = std::move(z);
    }
    return y;
}

Tensor conv3d_block_backward(Model& m, const ConvDef3& d, const NetCache& cache, const Tensor& dy,
                             bool need_dx) {
    const BlockCache& c = cache.blocks[static_cast<size_t>(d.cache_slot)];
    Tensor dz = d.act_relu ? nn::relu_backward(c.z, dy) : dy;
    nn::Conv3dGrads g = nn::conv3d_backward(c.xin, m.params[static_cast<size_t>(d.w)].value, dz,
                                            d.sd, d.sh, d.sw, d.pd, d.ph, d.pw, need_dx);
    accumulate(m.params[static_cast<size_t>(d.w)].grad, g.dw);
    accumulate(m.params[static_cast<size_t>(d.b)].grad, g.db);
    return need_dx ? std::move(g.dx) : Tensor();
}

void accumulate(Tensor& dst, const Tensor& src) {
    require_shape(dst.same_shape(src), "gradient accumulation shape mismatch");
    for (int64_t i = 0; i < dst.numel(); ++i) dst[i] += src[i];
}

}  // namespace net
}  // namespace p2p
