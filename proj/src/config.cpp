// SPDX-License-Identifier: Apache-2.0
#include "p2p/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "io_util.hpp"

namespace p2p {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Binds "section.key" names to config fields for both parsing and writing.
struct Binder {
    struct Entry {
        std::function<void(PipelineConfig&, const std::string&)> set;
        std::function<std::string(const PipelineConfig&)> get;
    };
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;

    template <typename T>
    static T parse_value(const std::string& v);

    template <typename T, typename Get, typename Set>
    void bind(const std::string& name, Get get, Set set) {
        entries[name] = {
            [set](PipelineConfig& c, const std::string& v) { set(c, parse_value<T>(v)); },
            [get](const PipelineConfig& c) {
                std::ostringstream os;
                os << get(c);
                return os.str();
            }};
        order.push_back(name);
    }
};

template <>
double Binder::parse_value<double>(const std::string& v) {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (trim(v.substr(pos)) != "") throw ConfigError("bad numeric value: " + v);
    return d;
}

template <>
float Binder::parse_value<float>(const std::string& v) {
    return static_cast<float>(parse_value<double>(v));
}

template <>
int Binder::parse_value<int>(const std::string& v) {
    size_t pos = 0;
    int i = std::stoi(v, &pos);
    if (trim(v.substr(pos)) != "") throw ConfigError("bad integer value: " + v);
    return i;
}

template <>
std::string Binder::parse_value<std::string>(const std::string& v) {
    return v;
}

#define BIND(Type, name, field)                                              \
    b.bind<Type>(                                                             \
        name, [](const PipelineConfig& c) { return c.field; },                \
        [](PipelineConfig& c, Type v) { c.field = v; })

const Binder& binder() {
    static const Binder b = [] {
        Binder b;
        BIND(int, "sensor.grid_x", sensor.grid_x);
        BIND(int, "sensor.grid_y", sensor.grid_y);
        BIND(int, "sensor.n_bins_raw", sensor.n_bins_raw);
        BIND(int, "sensor.n_bins_crop", sensor.n_bins_crop);
        BIND(double, "sensor.bin_duration_ps", sensor.bin_duration_ps);
        BIND(double, "sensor.fov_diagonal_deg", sensor.fov_diagonal_deg);
        BIND(double, "sensor.max_range_m", sensor.max_range_m);
        BIND(double, "sensor.pulse_fwhm_bins", sensor.pulse_fwhm_bins);
        BIND(double, "sensor.signal_photons", sensor.signal_photons);
        BIND(double, "sensor.ambient_rate", sensor.ambient_rate);

        BIND(int, "scene.hr_resolution", scene.hr_resolution);
        BIND(double, "scene.background_depth", scene.background_depth);
        BIND(double, "scene.background_reflectivity", scene.background_reflectivity);
        BIND(double, "scene.body_reflectivity", scene.body_reflectivity);
        BIND(double, "scene.min_root_separation_m", scene.min_root_separation_m);
        BIND(double, "scene.min_neck_separation_px", scene.min_neck_separation_px);
        BIND(double, "scene.heatmap_sigma_px", scene.heatmap_sigma_px);
        BIND(double, "scene.paf_halfwidth_px", scene.paf_halfwidth_px);
        BIND(double, "scene.height_lo", scene.constraints.height.lo);
        BIND(double, "scene.height_hi", scene.constraints.height.hi);
        BIND(double, "scene.root_z_lo", scene.constraints.root_z.lo);
        BIND(double, "scene.root_z_hi", scene.constraints.root_z.hi);
        BIND(double, "scene.yaw_lo", scene.constraints.yaw.lo);
        BIND(double, "scene.yaw_hi", scene.constraints.yaw.hi);
        BIND(double, "scene.depth_lo", scene.constraints.depth.lo);
        BIND(double, "scene.depth_hi", scene.constraints.depth.hi);

        BIND(float, "train.lr", train.lr);
        BIND(float, "train.lr_decay", train.lr_decay);
        BIND(int, "train.batch_size", train.batch_size);
        BIND(int, "train.epochs_depth", epochs_depth);
        BIND(int, "train.epochs_pose", epochs_pose);
        BIND(float, "train.w_depth", train.w_depth);
        BIND(float, "train.w_heatmap", train.w_heatmap);
        BIND(float, "train.w_paf", train.w_paf);

        BIND(double, "decode.peak_threshold", decode.peak_threshold);
        BIND(int, "decode.max_peaks_per_joint", decode.max_peaks_per_joint);
        BIND(int, "decode.paf_samples", decode.paf_samples);
        BIND(double, "decode.paf_min_dot", decode.paf_min_dot);
        BIND(int, "decode.paf_min_good", decode.paf_min_good);
        BIND(int, "decode.min_joints", decode.min_joints);

        BIND(std::string, "paths.out_dir", out_dir);
        return b;
    }();
    return b;
}

#undef BIND

}  // namespace

bool PipelineConfig::operator==(const PipelineConfig& other) const {
    return config_to_text(*this) == config_to_text(other);
}

PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = binder().entries.find(key);
        if (it == binder().entries.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
        it->second.set(cfg, value);
    }
    // Mirror the sensor FOV into the other sections that derive from it.
    cfg.scene.constraints.fov_diagonal_deg = cfg.sensor.fov_diagonal_deg;
    cfg.decode.fov_diagonal_deg = cfg.sensor.fov_diagonal_deg;
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_config_text(os.str());
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const std::string& name : binder().order) {
        const size_t dot = name.find('.');
        const std::string sec = name.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) os << "\n";
            os << "[" << sec << "]\n";
            section = sec;
        }
        os << name.substr(dot + 1) << " = " << binder().entries.at(name).get(cfg) << "\n";
    }
    return os.str();
}

void write_reference_config(const std::string& path) {
    io::File f = io::open_write(path);
    const std::string text = "# Reference configuration; every key at its default value.\n" +
                             config_to_text(PipelineConfig{});
    io::write_raw(f.get(), text.data(), text.size(), path);
}

}  // namespace p2p
