// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "p2p/tensor.hpp"

namespace p2p::nn {

struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    explicit Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
        grad = Tensor::zeros_like(value);
    }
    Parameter() = default;
};

// Standard Adam with bias correction. The step runs single-threaded so the
// update order is part of the determinism contract.
class Adam {
  public:
    struct Config {
        float lr = 1e-3f;
        float beta1 = 0.9f;
        float beta2 = 0.999f;
        float eps = 1e-8f;
    };

    Adam() : cfg_(Config{}) {}
    explicit Adam(Config cfg) : cfg_(cfg) {}

    void step(std::vector<Parameter*>& params);
    void zero_grad(std::vector<Parameter*>& params);

    int64_t step_count() const { return step_count_; }
    const Config& config() const { return cfg_; }
    void set_lr(float lr) { cfg_.lr = lr; }

  private:
    Config cfg_;
    int64_t step_count_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace p2p::nn
