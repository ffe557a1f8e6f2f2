// SPDX-License-Identifier: Apache-2.0
#include "p2p/nn/optim.hpp"

#include <cmath>

namespace p2p::nn {

void Adam::step(std::vector<Parameter*>& params) {
    if (m_.empty()) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const Parameter* p : params) {
            m_.push_back(Tensor::zeros_like(p->value));
            v_.push_back(Tensor::zeros_like(p->value));
        }
    }
    require(m_.size() == params.size(), "adam: parameter set changed between steps");
    ++step_count_;
    const float bc1 = 1.0f - std::pow(cfg_.beta1, static_cast<float>(step_count_));
    const float bc2 = 1.0f - std::pow(cfg_.beta2, static_cast<float>(step_count_));
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Parameter& p = *params[pi];
        require_shape(p.grad.same_shape(p.value), "adam: gradient shape mismatch for " + p.name);
        Tensor& m = m_[pi];
        Tensor& v = v_[pi];
        for (int64_t i = 0; i < p.value.numel(); ++i) {
            const float g = p.grad[i];
            m[i] = cfg_.beta1 * m[i] + (1.0f - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0f - cfg_.beta2) * g * g;
            const float mhat = m[i] / bc1;
            const float vhat = v[i] / bc2;
            p.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void Adam::zero_grad(std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->grad.fill(0.0f);
}

}  // namespace p2p::nn
