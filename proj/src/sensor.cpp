// SPDX-License-Identifier: Apache-2.0
#include "p2p/sensor.hpp"

#include <algorithm>
#include <cmath>

namespace p2p {

void SensorConfig::validate() const {
    require(grid_x > 0 && grid_y > 0, "sensor grid must be positive");
    require(n_bins_crop > 0 && n_bins_crop <= n_bins_raw, "n_bins_crop must be in (0, n_bins_raw]");
    require(bin_duration_ps > 0.0, "bin_duration must be positive");
    require(fov_diagonal_deg > 0.0 && fov_diagonal_deg < 180.0, "fov_diagonal out of (0, 180)");
    require(pulse_fwhm_bins > 0.0, "pulse_fwhm must be positive");
    require(signal_photons >= 0.0 && ambient_rate >= 0.0, "photon rates must be non-negative");
}

double bin_to_depth(int bin_index, const SensorConfig& cfg) {
    if (bin_index < 0 || bin_index >= cfg.n_bins_crop) {
        throw DomainError("bin_to_depth: bin index " + std::to_string(bin_index) +
                          " outside [0, " + std::to_string(cfg.n_bins_crop) + ")");
    }
    return (bin_index + 0.5) * cfg.bin_depth_m();
}

std::vector<double> expected_bin_rates(const HrScene& hr, int px, int py, const SensorConfig& cfg) {
    const int block = hr.size / cfg.grid_x;
    const double rays_per_pixel = static_cast<double>(block) * block;
    const double sigma = cfg.pulse_fwhm_bins / 2.3548200450309493;  // FWHM -> sigma
    const double bin_depth = cfg.bin_depth_m();

    std::vector<double> rates(static_cast<size_t>(cfg.n_bins_raw), cfg.ambient_rate);

    for (int ry = py * block; ry < (py + 1) * block; ++ry) {
        for (int rx = px * block; rx < (px + 1) * block; ++rx) {
            double r = hr.radial[static_cast<size_t>(ry) * hr.size + rx];
            if (r <= 0.0) continue;  // no hit, no return
            double refl = hr.reflectivity[static_cast<size_t>(ry) * hr.size + rx];
            double strength = refl * (1.0 / (r * r)) * (cfg.signal_photons / rays_per_pixel);
            double mu = r / bin_depth;  // continuous bin position of the return

            // Gaussian pulse truncated at +/-3 sigma, renormalized over its
            // discrete support so the photon budget is conserved. A support
            // that misses every integer collapses to the nearest bin.
            int lo = static_cast<int>(std::ceil(mu - 3.0 * sigma));
            int hi = static_cast<int>(std::floor(mu + 3.0 * sigma));
            lo = std::max(lo, 0);
            hi = std::min(hi, cfg.n_bins_raw - 1);
            if (lo > hi) {
                int b = static_cast<int>(std::lround(mu));
                if (b >= 0 && b < cfg.n_bins_raw) rates[static_cast<size_t>(b)] += strength;
                continue;
            }
            double norm = 0.0;
            for (int b = lo; b <= hi; ++b) {
                double d = (b - mu) / sigma;
                norm += std::exp(-0.5 * d * d);
            }
            if (norm <= 0.0) continue;
            for (int b = lo; b <= hi; ++b) {
                double d = (b - mu) / sigma;
                rates[static_cast<size_t>(b)] += strength * std::exp(-0.5 * d * d) / norm;
            }
        }
    }
    return rates;
}

Histogram simulate_histogram(const HrScene& hr, const SensorConfig& cfg, Pcg32& rng) {
    cfg.validate();
    require_shape(hr.size > 0 && hr.size % cfg.grid_x == 0 && hr.size % cfg.grid_y == 0 &&
                      hr.size / cfg.grid_x == hr.size / cfg.grid_y,
                  "hr resolution must be an integer multiple of the sensor grid");
    require_shape(hr.radial.size() == static_cast<size_t>(hr.size) * hr.size &&
                      hr.reflectivity.size() == hr.radial.size(),
                  "hr map sizes mismatch");

    std::vector<uint16_t> raw(static_cast<size_t>(cfg.grid_x) * cfg.grid_y * cfg.n_bins_raw, 0);
    for (int py = 0; py < cfg.grid_y; ++py) {
        for (int px = 0; px < cfg.grid_x; ++px) {
            std::vector<double> rates = expected_bin_rates(hr, px, py, cfg);
            size_t base = (static_cast<size_t>(py) * cfg.grid_x + px) * cfg.n_bins_raw;
            for (int b = 0; b < cfg.n_bins_raw; ++b) {
                uint32_t n = rng.poisson(rates[static_cast<size_t>(b)]);
                raw[base + b] = static_cast<uint16_t>(std::min<uint32_t>(n, 65535u));
            }
        }
    }
    return crop_histogram(raw, cfg);
}

Histogram crop_histogram(const std::vector<uint16_t>& raw, const SensorConfig& cfg) {
    require_shape(raw.size() == static_cast<size_t>(cfg.grid_x) * cfg.grid_y * cfg.n_bins_raw,
                  "raw histogram shape mismatch");
    require_shape(cfg.n_bins_crop <= cfg.n_bins_raw, "crop longer than raw histogram");
    Histogram h;
    h.grid_x = cfg.grid_x;
    h.grid_y = cfg.grid_y;
    h.n_bins = cfg.n_bins_crop;
    h.counts.resize(static_cast<size_t>(cfg.grid_x) * cfg.grid_y * cfg.n_bins_crop);
    for (int p = 0; p < cfg.grid_x * cfg.grid_y; ++p) {
        const uint16_t* src = raw.data() + static_cast<size_t>(p) * cfg.n_bins_raw;
        uint16_t* dst = h.counts.data() + static_cast<size_t>(p) * cfg.n_bins_crop;
        std::copy(src, src + cfg.n_bins_crop, dst);
    }
    return h;
}

MaxReturnDepthMap max_return_depth(const Histogram& h, const SensorConfig& cfg) {
    require_shape(h.grid_x == cfg.grid_x && h.grid_y == cfg.grid_y && h.n_bins == cfg.n_bins_crop,
                  "histogram does not match sensor config");
    MaxReturnDepthMap m;
    m.grid_x = h.grid_x;
    m.grid_y = h.grid_y;
    m.depth.assign(static_cast<size_t>(h.grid_x) * h.grid_y, kNoReturnDepth);
    m.valid.assign(m.depth.size(), 0);

    const uint32_t noise_floor = static_cast<uint32_t>(std::ceil(3.0 * cfg.ambient_rate));
    for (int p = 0; p < h.grid_x * h.grid_y; ++p) {
        const uint16_t* bins = h.counts.data() + static_cast<size_t>(p) * h.n_bins;
        int best = 0;
        for (int b = 1; b < h.n_bins; ++b) {
            if (bins[b] > bins[best]) best = b;  // ties keep the smaller index
        }
        if (bins[best] > noise_floor) {
            m.depth[static_cast<size_t>(p)] = bin_to_depth(best, cfg);
            m.valid[static_cast<size_t>(p)] = 1;
        }
    }
    return m;
}

}  // namespace p2p
