// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "p2p/scene.hpp"
#include "p2p/sensor.hpp"

namespace p2p {

// One training/validation record: the sensor histogram plus every label the
// synthetic rig produces for that frame.
struct Frame {
    Histogram hist;
    Tensor depth32;   // 32x32 z-depth, meters
    Tensor heatmaps;  // kNumJoints x 32 x 32
    Tensor pafs;      // kNumPafChannels x 32 x 32
    std::vector<PersonLabel> persons;
    uint8_t validation = 0;
};

struct Dataset {
    SensorConfig sensor;
    int persons_per_frame = 1;
    std::vector<Frame> frames;

    int64_t count_validation() const {
        int64_t n = 0;
        for (const Frame& f : frames) n += f.validation != 0;
        return n;
    }
};

struct SceneConfig {
    PoseConstraints constraints;
    int hr_resolution = 128;
    double background_depth = 1.8;
    double background_reflectivity = 0.5;
    double body_reflectivity = 0.8;
    double min_root_separation_m = 0.45;  // between persons, 3D
    double min_neck_separation_px = 8.0;  // projected, 0 disables
    double heatmap_sigma_px = 1.5;
    double paf_halfwidth_px = 1.0;
};

// Samples one scene with the given person count; separation constraints are
// enforced by resampling individual persons.
Scene sample_scene(Pcg32& rng, const SceneConfig& cfg, const SensorConfig& sensor, int persons);

// Renders, labels and simulates one frame end to end. The generator is
// derived from (seed, frame_index), so frames are independent and the result
// does not depend on generation order or thread count.
Frame generate_frame(const SceneConfig& cfg, const SensorConfig& sensor, int persons,
                     uint64_t seed, uint64_t frame_index, bool validation);

// The first validation_frames frames are flagged as the validation split.
Dataset generate_dataset(int n_frames, int persons_per_frame, const SceneConfig& cfg,
                         const SensorConfig& sensor, uint64_t seed, int validation_frames);

}  // namespace p2p
