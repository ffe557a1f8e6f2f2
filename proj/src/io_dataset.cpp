// SPDX-License-Identifier: Apache-2.0
#include "p2p/io.hpp"

#include "io_util.hpp"

namespace p2p {

namespace {

void write_sensor(std::FILE* f, const SensorConfig& s, const std::string& path) {
    io::write_pod<int32_t>(f, s.grid_x, path);
    io::write_pod<int32_t>(f, s.grid_y, path);
    io::write_pod<int32_t>(f, s.n_bins_raw, path);
    io::write_pod<int32_t>(f, s.n_bins_crop, path);
    io::write_pod<double>(f, s.bin_duration_ps, path);
    io::write_pod<double>(f, s.fov_diagonal_deg, path);
    io::write_pod<double>(f, s.max_range_m, path);
    io::write_pod<double>(f, s.pulse_fwhm_bins, path);
    io::write_pod<double>(f, s.signal_photons, path);
    io::write_pod<double>(f, s.ambient_rate, path);
    io::write_pod<uint64_t>(f, s.rng_seed, path);
}

SensorConfig read_sensor(std::FILE* f, const std::string& path) {
    SensorConfig s;
    s.grid_x = io::read_pod<int32_t>(f, path);
    s.grid_y = io::read_pod<int32_t>(f, path);
    s.n_bins_raw = io::read_pod<int32_t>(f, path);
    s.n_bins_crop = io::read_pod<int32_t>(f, path);
    s.bin_duration_ps = io::read_pod<double>(f, path);
    s.fov_diagonal_deg = io::read_pod<double>(f, path);
    s.max_range_m = io::read_pod<double>(f, path);
    s.pulse_fwhm_bins = io::read_pod<double>(f, path);
    s.signal_photons = io::read_pod<double>(f, path);
    s.ambient_rate = io::read_pod<double>(f, path);
    s.rng_seed = io::read_pod<uint64_t>(f, path);
    return s;
}

void write_tensor_data(std::FILE* f, const Tensor& t, const std::string& path) {
    io::write_raw(f, t.data(), sizeof(float) * static_cast<size_t>(t.numel()), path);
}

void read_tensor_data(std::FILE* f, Tensor& t, const std::string& path) {
    io::read_raw(f, t.data(), sizeof(float) * static_cast<size_t>(t.numel()), path);
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    io::File f = io::open_write(path);
    io::write_raw(f.get(), "P2PD", 4, path);
    io::write_pod<uint32_t>(f.get(), kDatasetVersion, path);
    io::write_pod<uint32_t>(f.get(), static_cast<uint32_t>(ds.frames.size()), path);
    io::write_pod<uint32_t>(f.get(), static_cast<uint32_t>(ds.persons_per_frame), path);
    write_sensor(f.get(), ds.sensor, path);

    for (const Frame& fr : ds.frames) {
        io::write_pod<uint8_t>(f.get(), fr.validation, path);
        io::write_raw(f.get(), fr.hist.counts.data(), sizeof(uint16_t) * fr.hist.counts.size(),
                      path);
        write_tensor_data(f.get(), fr.depth32, path);
        write_tensor_data(f.get(), fr.heatmaps, path);
        write_tensor_data(f.get(), fr.pafs, path);
        io::write_pod<uint8_t>(f.get(), static_cast<uint8_t>(fr.persons.size()), path);
        for (const PersonLabel& p : fr.persons) {
            for (int j = 0; j < kNumJoints; ++j) {
                io::write_pod<float>(f.get(), static_cast<float>(p.u[j]), path);
                io::write_pod<float>(f.get(), static_cast<float>(p.v[j]), path);
                io::write_pod<uint8_t>(f.get(), p.visible[j], path);
            }
            for (int j = 0; j < kNumJoints; ++j) {
                io::write_pod<float>(f.get(), static_cast<float>(p.xyz[j].x), path);
                io::write_pod<float>(f.get(), static_cast<float>(p.xyz[j].y), path);
                io::write_pod<float>(f.get(), static_cast<float>(p.xyz[j].z), path);
            }
        }
    }
}

Dataset load_dataset(const std::string& path) {
    io::File f = io::open_read(path);
    io::check_magic(f.get(), "P2PD", path);
    const uint32_t version = io::read_pod<uint32_t>(f.get(), path);
    if (version != kDatasetVersion) {
        throw FormatError("unsupported dataset version " + std::to_string(version) + ": " + path);
    }
    const uint32_t n_frames = io::read_pod<uint32_t>(f.get(), path);
    Dataset ds;
    ds.persons_per_frame = static_cast<int>(io::read_pod<uint32_t>(f.get(), path));
    ds.sensor = read_sensor(f.get(), path);

    const size_t hist_len = static_cast<size_t>(ds.sensor.grid_x) * ds.sensor.grid_y *
                            ds.sensor.n_bins_crop;
    ds.frames.resize(n_frames);
    for (Frame& fr : ds.frames) {
        fr.validation = io::read_pod<uint8_t>(f.get(), path);
        fr.hist.grid_x = ds.sensor.grid_x;
        fr.hist.grid_y = ds.sensor.grid_y;
        fr.hist.n_bins = ds.sensor.n_bins_crop;
        fr.hist.counts.resize(hist_len);
        io::read_raw(f.get(), fr.hist.counts.data(), sizeof(uint16_t) * hist_len, path);
        fr.depth32 = Tensor({32, 32});
        read_tensor_data(f.get(), fr.depth32, path);
        fr.heatmaps = Tensor({kNumJoints, 32, 32});
        read_tensor_data(f.get(), fr.heatmaps, path);
        fr.pafs = Tensor({kNumPafChannels, 32, 32});
        read_tensor_data(f.get(), fr.pafs, path);
        const uint8_t n_persons = io::read_pod<uint8_t>(f.get(), path);
        fr.persons.resize(n_persons);
        for (PersonLabel& p : fr.persons) {
            for (int j = 0; j < kNumJoints; ++j) {
                p.u[j] = io::read_pod<float>(f.get(), path);
                p.v[j] = io::read_pod<float>(f.get(), path);
                p.visible[j] = io::read_pod<uint8_t>(f.get(), path);
            }
            for (int j = 0; j < kNumJoints; ++j) {
                p.xyz[j].x = io::read_pod<float>(f.get(), path);
                p.xyz[j].y = io::read_pod<float>(f.get(), path);
                p.xyz[j].z = io::read_pod<float>(f.get(), path);
            }
        }
    }
    return ds;
}

}  // namespace p2p
