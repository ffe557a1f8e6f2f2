// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "p2p/common.hpp"
#include "p2p/rng.hpp"

namespace p2p {

constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Configuration of the vl53l5-like SPAD array. Distances are meters,
// bin_duration_ps is the time-bin width in picoseconds.
struct SensorConfig {
    int grid_x = 4;
    int grid_y = 4;
    int n_bins_raw = 144;
    int n_bins_crop = 100;
    double bin_duration_ps = 125.0;
    double fov_diagonal_deg = 60.0;
    double max_range_m = 3.0;
    double pulse_fwhm_bins = 2.0;
    double signal_photons = 200.0;  // expected photons per pixel from a unit-reflectivity surface at 1 m
    double ambient_rate = 0.5;      // expected background counts per bin
    uint64_t rng_seed = 0;

    // Depth spanned by one time bin: c * bin_duration / 2.
    double bin_depth_m() const { return kSpeedOfLight * bin_duration_ps * 1e-12 * 0.5; }

    // Maximum depth recoverable after the crop.
    double crop_range_m() const { return n_bins_crop * bin_depth_m(); }

    void validate() const;
};

// Per-pixel photon count histograms, cropped to n_bins_crop bins.
// Layout: counts[(y * grid_x + x) * n_bins + b].
struct Histogram {
    int grid_x = 0;
    int grid_y = 0;
    int n_bins = 0;
    std::vector<uint16_t> counts;

    uint16_t at(int x, int y, int b) const {
        return counts[(static_cast<size_t>(y) * grid_x + x) * n_bins + b];
    }
    uint16_t& at(int x, int y, int b) {
        return counts[(static_cast<size_t>(y) * grid_x + x) * n_bins + b];
    }
};

constexpr double kNoReturnDepth = -1.0;  // sentinel for pixels without a valid return

struct MaxReturnDepthMap {
    int grid_x = 0;
    int grid_y = 0;
    std::vector<double> depth;  // meters where valid, kNoReturnDepth otherwise
    std::vector<uint8_t> valid;
};

// High-resolution rendered views consumed by the simulator: radial (ray)
// distance and surface reflectivity, both row-major at hr_size x hr_size.
// No-hit pixels carry radial < 0.
struct HrScene {
    int size = 0;
    std::vector<double> radial;
    std::vector<double> reflectivity;
};

// Depth of the center of a cropped bin: (b + 0.5) * c * bin_duration / 2.
double bin_to_depth(int bin_index, const SensorConfig& cfg);

// Expected counts per raw bin for one SPAD pixel, before Poisson sampling.
// Exposed so tests can check the sampler against its own mean.
std::vector<double> expected_bin_rates(const HrScene& hr, int px, int py, const SensorConfig& cfg);

// Poisson-samples the raw 144-bin cube from the rendered scene, then crops.
Histogram simulate_histogram(const HrScene& hr, const SensorConfig& cfg, Pcg32& rng);

// First n_bins_crop bins of each pixel; the tail is discarded.
Histogram crop_histogram(const std::vector<uint16_t>& raw, const SensorConfig& cfg);

// Classical baseline: per pixel, depth of the highest-count bin. Ties break
// toward the smaller bin; a maximum at or below ceil(3 * ambient_rate) marks
// the pixel invalid.
MaxReturnDepthMap max_return_depth(const Histogram& h, const SensorConfig& cfg);

}  // namespace p2p
