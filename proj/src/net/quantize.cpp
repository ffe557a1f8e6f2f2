// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/networks.hpp"

namespace p2p {

// Per-tensor affine int8: scale = (max - min) / 255,
// zero_point = round(-min / scale) - 128, both clamped to the int8 domain.
// Constant tensors store scale = value with q - zp = 1 so the round trip is
// exact (a scale-1 integer offset cannot represent an arbitrary constant).
QuantizedModel quantize_weights(const Model& model) {
    QuantizedModel q;
    q.arch_id = model.arch_id;
    q.tensors.reserve(model.params.size());
    for (const nn::Parameter& p : model.params) {
        QuantizedTensor t;
        t.name = p.name;
        t.shape = p.value.shape();
        t.data.resize(static_cast<size_t>(p.value.numel()));

        float lo = p.value[0], hi = p.value[0];
        for (int64_t i = 1; i < p.value.numel(); ++i) {
            lo = std::min(lo, p.value[i]);
            hi = std::max(hi, p.value[i]);
        }
        if (hi == lo) {
            if (lo == 0.0f) {
                t.scale = 1.0f;
                t.zero_point = 0;
                std::fill(t.data.begin(), t.data.end(), static_cast<int8_t>(0));
            } else {
                t.scale = lo;
                t.zero_point = 0;
                std::fill(t.data.begin(), t.data.end(), static_cast<int8_t>(1));
            }
            q.tensors.push_back(std::move(t));
            continue;
        }
        t.scale = (hi - lo) / 255.0f;
        t.zero_point = static_cast<int32_t>(std::lround(-lo / t.scale)) - 128;
        t.zero_point = std::clamp(t.zero_point, -128, 127);
        for (int64_t i = 0; i < p.value.numel(); ++i) {
            long v = std::lround(p.value[i] / t.scale) + t.zero_point;
            t.data[static_cast<size_t>(i)] =
                static_cast<int8_t>(std::clamp<long>(v, -128, 127));
        }
        q.tensors.push_back(std::move(t));
    }
    return q;
}

void dequantize_weights(const QuantizedModel& q, Model& model) {
    require(q.arch_id == model.arch_id,
            "dequantize: architecture mismatch (" + q.arch_id + " vs " + model.arch_id + ")");
    require(q.tensors.size() == model.params.size(), "dequantize: tensor count mismatch");
    for (size_t i = 0; i < q.tensors.size(); ++i) {
        const QuantizedTensor& t = q.tensors[i];
        nn::Parameter& p = model.params[i];
        require(t.name == p.name, "dequantize: tensor name mismatch at " + t.name);
        require_shape(t.shape == p.value.shape(), "dequantize: shape mismatch at " + t.name);
        for (int64_t j = 0; j < p.value.numel(); ++j) {
            p.value[j] = t.scale * static_cast<float>(static_cast<int32_t>(t.data[static_cast<size_t>(j)]) -
                                                      t.zero_point);
        }
    }
}

}  // namespace p2p
