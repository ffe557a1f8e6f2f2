// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "p2p/dataset.hpp"
#include "p2p/metrics.hpp"
#include "p2p/networks.hpp"

namespace p2p {

// All multi-byte values little-endian; histograms are unsigned 16-bit.
// Corrupt magic, unsupported version and truncation raise FormatError with
// distinct messages.

constexpr uint32_t kDatasetVersion = 1;
constexpr uint32_t kModelVersion = 1;

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// Float32 and int8 model containers share the layout; the dtype tag applies
// to every tensor in the file.
void save_model(const Model& model, const std::string& path);
void save_model(const QuantizedModel& model, const std::string& path);

enum class ModelDtype { kFloat32, kInt8 };
ModelDtype peek_model_dtype(const std::string& path);
std::string peek_model_arch(const std::string& path);

// Loads float weights into a model built for the same architecture.
void load_model(const std::string& path, Model& model);
QuantizedModel load_quantized_model(const std::string& path);
// Accepts either dtype; int8 files are dequantized into the model.
void load_model_any(const std::string& path, Model& model);

// Line-delimited pose records: one frame per line, 6-significant-digit
// decimal formatting, parse-stable.
void save_pose_records(const std::vector<FramePoses>& frames, const std::string& path);
std::vector<FramePoses> load_pose_records(const std::string& path);

// Plain-text loss log, one epoch per line: index, train loss, val loss.
void save_loss_log(const std::vector<EpochLog>& log, const std::string& path);

}  // namespace p2p
