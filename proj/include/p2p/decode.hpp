// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "p2p/geometry.hpp"
#include "p2p/skeleton.hpp"
#include "p2p/tensor.hpp"

namespace p2p {

struct Keypoint2D {
    int joint = 0;
    double u = 0.0, v = 0.0;  // sub-pixel
    double score = 0.0;
};

struct LimbCandidate {
    int limb = 0;
    int a = 0, b = 0;  // indices into the keypoint lists of the two joint types
    double score = 0.0;
};

struct Skeleton2D {
    std::array<int, kNumJoints> keypoint{};  // index into per-type keypoint list, -1 if missing
    std::array<double, kNumJoints> u{}, v{}, score{};
    int joints_found = 0;
    double person_score = 0.0;  // mean accepted limb score

    Skeleton2D() { keypoint.fill(-1); }
};

struct Joint3D {
    bool valid = false;
    Vec3 xyz;
};

struct Skeleton3D {
    std::array<Joint3D, kNumJoints> joints{};
    double score = 0.0;
};

struct DecodeConfig {
    double peak_threshold = 0.1;
    int max_peaks_per_joint = 6;
    int paf_samples = 10;
    double paf_min_dot = 0.05;
    int paf_min_good = 8;
    int min_joints = 4;
    double fov_diagonal_deg = 60.0;
};

// Strict 3x3 local maxima above the threshold with per-axis quadratic
// sub-pixel refinement; at most max_peaks are kept, highest score first,
// row-major order breaking ties.
std::vector<Keypoint2D> extract_peaks(const float* heatmap, int size, const DecodeConfig& cfg);

// Average PAF alignment over evenly spaced samples on the segment a->b with
// bilinear field sampling. Rejected pairings (too few aligned samples or a
// zero-length segment) score -1.
double score_limb(const Tensor& pafs, int size, const Keypoint2D& a, const Keypoint2D& b, int limb,
                  const DecodeConfig& cfg);

// Greedy per-limb matching in fixed limb order followed by merging limbs
// that share keypoints; fragments with fewer than min_joints joints are
// dropped. Deterministic for identical inputs.
std::vector<Skeleton2D> assemble_skeletons(
    const std::array<std::vector<Keypoint2D>, kNumJoints>& keypoints, const Tensor& pafs, int size,
    const DecodeConfig& cfg);

// Full decode: heatmaps (14xSxS) + pafs (26xSxS) -> 2D skeletons.
std::vector<Skeleton2D> decode_pose_maps(const Tensor& heatmaps, const Tensor& pafs,
                                         const DecodeConfig& cfg);

// Median 3x3 depth lookup plus pinhole back-projection.
Skeleton3D lift_to_3d(const Skeleton2D& s, const Tensor& depth32, const DecodeConfig& cfg);

// Minimum total neck-to-neck distance over all assignments (exhaustive, at
// most 3 persons). Result maps truth index -> prediction index or -1.
std::vector<int> match_to_ground_truth(const std::vector<Skeleton3D>& predicted,
                                       const std::vector<Skeleton3D>& truth);

}  // namespace p2p
