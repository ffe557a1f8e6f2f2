// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "p2p/dataset.hpp"
#include "p2p/decode.hpp"
#include "p2p/networks.hpp"

namespace p2p {

// Plain-text key-value configuration with section headers. Unknown keys are
// rejected; write_reference_config() documents every key with its default.
struct PipelineConfig {
    SensorConfig sensor;
    SceneConfig scene;
    TrainConfig train;
    int epochs_depth = 14;
    int epochs_pose = 7;
    DecodeConfig decode;
    std::string out_dir = ".";

    bool operator==(const PipelineConfig& other) const;
};

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);
std::string config_to_text(const PipelineConfig& cfg);
void write_reference_config(const std::string& path);

}  // namespace p2p
