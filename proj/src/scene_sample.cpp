// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/scene.hpp"

namespace p2p {

namespace {

double draw(Pcg32& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

// Per-axis half-FOV tangent of a square sensor with the given diagonal FOV.
double axis_tan(double fov_diag_deg) {
    return std::tan(fov_diag_deg * 0.5 * M_PI / 180.0) / std::sqrt(2.0);
}

bool inside_volume(const SkeletonPose3D& pose, const PoseConstraints& c) {
    const double t = axis_tan(c.fov_diagonal_deg);
    for (const Vec3& j : pose.joints) {
        if (j.z < c.depth.lo || j.z > c.depth.hi) return false;
        const double lateral = j.z * t - c.frustum_margin_m;
        if (std::fabs(j.x) > lateral || std::fabs(j.y) > lateral) return false;
    }
    return true;
}

}  // namespace

void PoseConstraints::validate() const {
    auto ordered = [](const Range& r) { return r.hi >= r.lo; };
    bool ok = ordered(height) && ordered(root_x) && ordered(root_y) && ordered(root_z) &&
              ordered(yaw) && ordered(torso_pitch) && ordered(head_pitch) &&
              ordered(shoulder_elevation) && ordered(shoulder_swing) && ordered(elbow_flex) &&
              ordered(elbow_flex_axis) && ordered(hip_flex) && ordered(hip_abduct) &&
              ordered(knee_flex) && ordered(depth) && height.lo > 0.0 && depth.lo > 0.0 &&
              fov_diagonal_deg > 0.0 && fov_diagonal_deg < 180.0 && max_attempts > 0;
    if (!ok) throw ConfigError("pose constraints are empty or inverted");
}

BodyShape sample_body_shape(Pcg32& rng, const PoseConstraints& c) {
    return BodyShape::from_height(draw(rng, c.height));
}

// The 100-bin depth range cannot frame a standing adult at the 60-degree
// FOV, so blind rejection over the full root range almost never lands.
// Instead: draw articulation first (legs share a crouch factor, since
// independent flexion draws rarely fold a tall body into the frustum), then
// scan candidate root depths and intersect, per axis, the root offsets under
// which every joint stays inside the frustum. The root is placed uniformly
// inside that window, itself clipped by the configured root ranges. Draw
// order is fixed, so generation stays deterministic.
SkeletonPose3D sample_pose(Pcg32& rng, const PoseConstraints& c, const BodyShape& shape) {
    c.validate();
    const double tan_ax = axis_tan(c.fov_diagonal_deg);
    constexpr int kDepthCandidates = 12;
    constexpr int kCrouchLevels = 6;

    struct Window {
        double z, x_lo, x_hi, y_lo, y_hi;
    };
    // Feasible (x, y) root windows of a root-relative pose per candidate depth.
    auto find_windows = [&](const SkeletonPose3D& rel, Window* windows) {
        int n = 0;
        for (int k = 0; k < kDepthCandidates; ++k) {
            const double rz =
                c.root_z.lo + (c.root_z.hi - c.root_z.lo) * (k + 0.5) / kDepthCandidates;
            bool depth_ok = true;
            double x_lo = c.root_x.lo, x_hi = c.root_x.hi;
            double y_lo = c.root_y.lo, y_hi = c.root_y.hi;
            for (const Vec3& j : rel.joints) {
                const double jz = j.z + rz;
                if (jz < c.depth.lo || jz > c.depth.hi) {
                    depth_ok = false;
                    break;
                }
                const double lateral = jz * tan_ax - c.frustum_margin_m;
                x_lo = std::max(x_lo, -lateral - j.x);
                x_hi = std::min(x_hi, lateral - j.x);
                y_lo = std::max(y_lo, -lateral - j.y);
                y_hi = std::min(y_hi, lateral - j.y);
            }
            if (depth_ok && x_lo <= x_hi && y_lo <= y_hi) {
                windows[n++] = {rz, x_lo, x_hi, y_lo, y_hi};
            }
        }
        return n;
    };

    for (int attempt = 0; attempt < c.max_attempts; ++attempt) {
        const double zu = rng.next_double();
        const double xu = rng.next_double();
        const double yu = rng.next_double();
        PoseAngles a;
        a.yaw = draw(rng, c.yaw);
        a.torso_pitch = draw(rng, c.torso_pitch);
        a.head_pitch = draw(rng, c.head_pitch);
        const double crouch0 = std::pow(rng.next_double(), 0.7);
        double jitter_h[2], jitter_k[2];
        for (int side = 0; side < 2; ++side) {
            a.shoulder_elevation[side] = draw(rng, c.shoulder_elevation);
            a.shoulder_swing[side] = draw(rng, c.shoulder_swing);
            a.elbow_flex[side] = draw(rng, c.elbow_flex);
            a.elbow_flex_axis[side] = draw(rng, c.elbow_flex_axis);
            jitter_h[side] = rng.next_double() - 0.5;
            a.hip_abduct[side] = draw(rng, c.hip_abduct);
            jitter_k[side] = rng.next_double() - 0.5;
        }

        // Fold the body from the drawn configuration toward its most compact
        // in-frustum form: shanks folded back (kneeling), thighs near
        // vertical, torso leaning away from the sensor, raised arms lowered.
        // Forward folds do not help here: they move joints closer to the
        // camera, where the frustum is narrower. Every folded value stays
        // inside its constraint range; draws that never fit are rejected.
        a.root = Vec3{0.0, 0.0, 0.0};
        const PoseAngles drawn = a;
        Window windows[kDepthCandidates];
        int n_windows = 0;
        SkeletonPose3D rel;
        for (int level = 0; level < kCrouchLevels; ++level) {
            const double t = static_cast<double>(level) / (kCrouchLevels - 1);
            const double fold = std::clamp(crouch0 + (1.0 - crouch0) * t, 0.0, 1.0);
            a.torso_pitch = drawn.torso_pitch + (c.torso_pitch.lo - drawn.torso_pitch) * t;
            for (int side = 0; side < 2; ++side) {
                const double hm =
                    std::clamp((1.0 - fold) * (0.5 + jitter_h[side]), 0.0, 1.0);
                const double km =
                    std::clamp(fold + (1.0 - fold) * (0.5 + jitter_k[side]) * 0.6, 0.0, 1.0);
                a.hip_flex[side] = c.hip_flex.lo + (c.hip_flex.hi - c.hip_flex.lo) * hm;
                a.knee_flex[side] = c.knee_flex.lo + (c.knee_flex.hi - c.knee_flex.lo) * km;
                const double e_down =
                    std::clamp(1.1, c.shoulder_elevation.lo, c.shoulder_elevation.hi);
                if (drawn.shoulder_elevation[side] < e_down) {
                    a.shoulder_elevation[side] =
                        drawn.shoulder_elevation[side] +
                        (e_down - drawn.shoulder_elevation[side]) * t;
                }
                if (drawn.shoulder_swing[side] > 0.0) {
                    a.shoulder_swing[side] = drawn.shoulder_swing[side] * (1.0 - t);
                }
            }
            rel = pose_from_angles(shape, a);
            n_windows = find_windows(rel, windows);
            if (n_windows > 0) break;
        }
        if (n_windows == 0) continue;

        const Window& w = windows[std::min(static_cast<int>(zu * n_windows), n_windows - 1)];
        const Vec3 root{w.x_lo + (w.x_hi - w.x_lo) * xu, w.y_lo + (w.y_hi - w.y_lo) * yu, w.z};
        SkeletonPose3D pose = rel;
        for (Vec3& j : pose.joints) j = j + root;
        if (inside_volume(pose, c)) return pose;
    }
    throw ConfigError("sample_pose: no feasible pose within " + std::to_string(c.max_attempts) +
                      " attempts; constraints do not fit the working volume");
}

}  // namespace p2p
