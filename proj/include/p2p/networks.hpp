// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "p2p/dataset.hpp"
#include "p2p/nn/optim.hpp"
#include "p2p/tensor.hpp"

namespace p2p {

struct LayerSpec {
    std::string name;
    std::string kind;  // conv2d, conv3d, upsample2x, concat, relu-fused flags in note
    std::vector<int64_t> weight_shape;
    int stride = 1;
    int pad = 0;
    std::string note;
};

// Ordered named weight tensors plus architecture metadata; the serializable
// unit both networks build on.
class Model {
  public:
    std::string arch_id;
    std::vector<nn::Parameter> params;
    std::vector<LayerSpec> layers;

    int64_t param_count() const {
        int64_t n = 0;
        for (const nn::Parameter& p : params) n += p.value.numel();
        return n;
    }

    int find_param(const std::string& name) const {
        for (size_t i = 0; i < params.size(); ++i) {
            if (params[i].name == name) return static_cast<int>(i);
        }
        return -1;
    }

    std::vector<nn::Parameter*> param_ptrs() {
        std::vector<nn::Parameter*> out;
        out.reserve(params.size());
        for (nn::Parameter& p : params) out.push_back(&p);
        return out;
    }

    std::string summary() const;

    virtual ~Model() = default;
};

// Saved activations of one forward pass, consumed by backward.
struct BlockCache {
    Tensor xin;  // conv input (after replicate padding when used)
    Tensor z;    // pre-activation conv output
};

struct NetCache {
    std::vector<BlockCache> blocks;
    std::vector<Tensor> extra;  // reshapes and other named intermediates
};

// Histogram super-resolution network: 4x4x100 photon counts in, 32x32 depth
// out. Three temporally strided 3D conv blocks collapse the time axis
// (100 -> 25 -> 6 -> 1), then bilinear x2 upsampling with 2D convs grows
// 4x4 to 32x32.
class Pixels2Depth : public Model {
  public:
    explicit Pixels2Depth(uint64_t init_seed);

    using Cache = NetCache;
    // x: N x 1 x 100 x 4 x 4 (normalized counts). Returns N x 1 x 32 x 32.
    Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
    // Accumulates parameter gradients (input gradients are not needed).
    void backward(const Cache& cache, const Tensor& dy);

    static constexpr int kBins = 100;
    static constexpr int kGrid = 4;
    static constexpr int kOut = 32;

  private:
    struct Defs;
    std::shared_ptr<const Defs> defs_;
};

struct PoseMaps {
    Tensor heatmaps;  // N x 14 x 32 x 32
    Tensor pafs;      // N x 26 x 32 x 32
};

// Depth-to-pose network: a multi-scale conv2d encoder/decoder backbone at
// 32x32 input/output resolution with two OpenPose-style refinement stages;
// each stage re-consumes the backbone features concatenated with the
// previous stage's heatmap/PAF heads. All spatial convs use edge-replicate
// padding, so a constant input produces spatially constant heads.
class Depth2Pose : public Model {
  public:
    explicit Depth2Pose(uint64_t init_seed);

    using Cache = NetCache;
    // x: N x 1 x 32 x 32 (depth / crop range). Heads of all three stages.
    std::vector<PoseMaps> forward(const Tensor& x, Cache* cache = nullptr) const;
    // d_heads: per stage upstream gradients for both heads.
    void backward(const Cache& cache, const std::vector<PoseMaps>& d_heads);

    static constexpr int kStages = 3;  // initial prediction + two refinements
    static constexpr int kSize = 32;

  private:
    struct Defs;
    std::shared_ptr<const Defs> defs_;
};

struct TrainConfig {
    float lr = 1e-3f;
    float lr_decay = 1.0f;  // final lr = lr * lr_decay, cosine path; 1 = constant
    int batch_size = 16;
    int epochs = 10;
    float w_depth = 1.0f;
    float w_heatmap = 1.0f;
    float w_paf = 1.0f;
    uint64_t seed = 0;

    void validate() const;
};

struct EpochLog {
    int epoch;
    double train_loss;
    double val_loss;
};

struct TrainResult {
    std::vector<EpochLog> log;
    double best_val_loss = 0.0;
    int best_epoch = -1;
};

// Adam over seeded shuffled minibatches; returns with the model holding the
// epoch checkpoint with the lowest validation loss.
TrainResult train_depth(Pixels2Depth& model, const Dataset& ds, const TrainConfig& cfg);

// Pose training targets come from the labels; the depth input comes from the
// dataset, or from a trained histogram network when one is supplied, which
// matches what the pose stage sees at inference time.
TrainResult train_pose(Depth2Pose& model, const Dataset& ds, const TrainConfig& cfg,
                       const Pixels2Depth* depth_source = nullptr);

// Per-frame input normalization: counts scaled by the frame maximum.
Tensor histogram_to_input(const Histogram& h);

// Forward pass plus clamping to the physical range [0, crop_range].
Tensor infer_depth(const Pixels2Depth& model, const Histogram& h, const SensorConfig& cfg);

// Final refinement stage heads for one depth map (1 x 32 x 32 or 32 x 32).
PoseMaps infer_pose_maps(const Depth2Pose& model, const Tensor& depth32, const SensorConfig& cfg);

// Post-training per-tensor affine int8 quantization of the weights.
struct QuantizedTensor {
    std::string name;
    std::vector<int64_t> shape;
    float scale = 1.0f;
    int32_t zero_point = 0;
    std::vector<int8_t> data;
};

struct QuantizedModel {
    std::string arch_id;
    std::vector<QuantizedTensor> tensors;
};

QuantizedModel quantize_weights(const Model& model);
// Overwrites the model's parameters with dequantized weights; inference then
// runs the ordinary float path.
void dequantize_weights(const QuantizedModel& q, Model& model);

}  // namespace p2p
