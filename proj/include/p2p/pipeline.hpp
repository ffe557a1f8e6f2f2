// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "p2p/config.hpp"
#include "p2p/dataset.hpp"
#include "p2p/decode.hpp"
#include "p2p/io.hpp"
#include "p2p/metrics.hpp"
#include "p2p/networks.hpp"

namespace p2p {

// Seed fan-out from one master seed. Every stage derives its own stream, so
// any stage reproduces in isolation:
//   synth      derive_seed(master, "synth")        -> per-frame scene/sensor
//   depth net  derive_seed(master, "init-depth")   -> weight init
//   pose net   derive_seed(master, "init-pose")    -> weight init
//   training   derive_seed(master, "train-depth") / "train-pose" -> shuffles
struct SeedPlan {
    uint64_t master = 0;
    uint64_t synth() const { return derive_seed(master, "synth"); }
    uint64_t init_depth() const { return derive_seed(master, "init-depth"); }
    uint64_t init_pose() const { return derive_seed(master, "init-pose"); }
    uint64_t train_depth() const { return derive_seed(master, "train-depth"); }
    uint64_t train_pose() const { return derive_seed(master, "train-pose"); }
};

struct StageTimes {
    std::vector<double> depth_s, pose_s, post_s;  // per frame

    double median(const std::vector<double>& v) const;
    double p95(const std::vector<double>& v) const;
    // 1 / (sum of stage medians): the paper-style single-stream rate.
    double fps() const;
};

struct InferenceResult {
    std::vector<FramePoses> poses;
    std::vector<Tensor> depth_maps;  // kept only when requested
    StageTimes times;
};

// Runs histogram -> depth -> pose maps -> skeletons over the selected frames.
InferenceResult run_inference(const Dataset& ds, const Pixels2Depth& depth_net,
                              const Depth2Pose& pose_net, const DecodeConfig& decode,
                              bool validation_only, bool keep_depth_maps);

// Ground-truth 3D skeletons from the dataset labels; a joint is valid only
// when its 2D label was visible, which also scopes the evaluation.
std::vector<FramePoses> truth_poses(const Dataset& ds, bool validation_only);

}  // namespace p2p
