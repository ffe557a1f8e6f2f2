// SPDX-License-Identifier: Apache-2.0
#include "p2p/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace p2p {

namespace {

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

double StageTimes::median(const std::vector<double>& v) const {
    if (v.empty()) return 0.0;
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return s[(s.size() - 1) / 2];
}

double StageTimes::p95(const std::vector<double>& v) const {
    if (v.empty()) return 0.0;
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return s[std::min(s.size() - 1, static_cast<size_t>(std::ceil(0.95 * s.size())) )];
}

double StageTimes::fps() const {
    const double total = median(depth_s) + median(pose_s) + median(post_s);
    return total > 0.0 ? 1.0 / total : 0.0;
}

InferenceResult run_inference(const Dataset& ds, const Pixels2Depth& depth_net,
                              const Depth2Pose& pose_net, const DecodeConfig& decode,
                              bool validation_only, bool keep_depth_maps) {
    InferenceResult out;
    DecodeConfig dcfg = decode;
    dcfg.fov_diagonal_deg = ds.sensor.fov_diagonal_deg;

    for (size_t i = 0; i < ds.frames.size(); ++i) {
        const Frame& fr = ds.frames[i];
        if (validation_only && !fr.validation) continue;

        double t0 = now_s();
        Tensor depth = infer_depth(depth_net, fr.hist, ds.sensor);
        double t1 = now_s();
        if (!all_finite(depth)) throw NumericError("non-finite depth output at frame " +
                                                   std::to_string(i));
        PoseMaps maps = infer_pose_maps(pose_net, depth, ds.sensor);
        double t2 = now_s();
        std::vector<Skeleton2D> skels2d = decode_pose_maps(maps.heatmaps, maps.pafs, dcfg);
        FramePoses fp;
        fp.frame_id = static_cast<int64_t>(i);
        for (const Skeleton2D& s : skels2d) {
            fp.persons.push_back(lift_to_3d(s, depth, dcfg));
        }
        double t3 = now_s();

        out.times.depth_s.push_back(t1 - t0);
        out.times.pose_s.push_back(t2 - t1);
        out.times.post_s.push_back(t3 - t2);
        out.poses.push_back(std::move(fp));
        if (keep_depth_maps) out.depth_maps.push_back(std::move(depth));
    }
    return out;
}

std::vector<FramePoses> truth_poses(const Dataset& ds, bool validation_only) {
    std::vector<FramePoses> out;
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        const Frame& fr = ds.frames[i];
        if (validation_only && !fr.validation) continue;
        FramePoses fp;
        fp.frame_id = static_cast<int64_t>(i);
        for (const PersonLabel& p : fr.persons) {
            Skeleton3D s;
            for (int j = 0; j < kNumJoints; ++j) {
                s.joints[j].valid = p.visible[j] != 0;
                s.joints[j].xyz = p.xyz[j];
            }
            fp.persons.push_back(s);
        }
        out.push_back(std::move(fp));
    }
    return out;
}

}  // namespace p2p
