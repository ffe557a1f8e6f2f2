// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/scene.hpp"

namespace p2p {

namespace {

// Segment lengths as fractions of standing height. Ankle-to-ground plus the
// leg, torso and head terms sum to exactly 1.
constexpr double kAnkleDrop = 0.053;
constexpr double kShank = 0.246;
constexpr double kThigh = 0.245;
constexpr double kTorso = 0.300;
constexpr double kNeckHead = 0.090;
constexpr double kHeadRadius = 0.066;
constexpr double kHipHalf = 0.060;
constexpr double kShoulderHalf = 0.110;
constexpr double kUpperArm = 0.172;
constexpr double kForearm = 0.157;

static_assert(kAnkleDrop + kShank + kThigh + kTorso + kNeckHead + kHeadRadius > 0.9999 &&
              kAnkleDrop + kShank + kThigh + kTorso + kNeckHead + kHeadRadius < 1.0001);

// Capsule radii at a 1.70 m reference height, scaled linearly.
constexpr double kRadius170[kNumLimbs] = {
    0.050,  // head-neck
    0.055, 0.055,  // neck-shoulder
    0.045, 0.045,  // upper arm
    0.038, 0.038,  // forearm
    0.070, 0.070,  // neck-hip
    0.065, 0.065,  // thigh
    0.050, 0.050,  // shank
};

struct Basis {
    Vec3 ex, ey, ez;
    Vec3 apply(const Vec3& q) const { return ex * q.x + ey * q.y + ez * q.z; }
};

}  // namespace

BodyShape BodyShape::from_height(double height) {
    BodyShape s;
    s.height = height;
    s.hip_half_width = kHipHalf * height;
    s.shoulder_half_width = kShoulderHalf * height;
    s.head_radius = kHeadRadius * height;
    s.torso_semi_axes = Vec3{0.115 * height, 0.185 * height, 0.065 * height};

    const double torso = kTorso * height;
    s.limb_length[0] = kNeckHead * height;
    s.limb_length[1] = s.limb_length[2] = s.shoulder_half_width;
    s.limb_length[3] = s.limb_length[4] = kUpperArm * height;
    s.limb_length[5] = s.limb_length[6] = kForearm * height;
    s.limb_length[7] = s.limb_length[8] =
        std::sqrt(torso * torso + s.hip_half_width * s.hip_half_width);
    s.limb_length[9] = s.limb_length[10] = kThigh * height;
    s.limb_length[11] = s.limb_length[12] = kShank * height;

    const double scale = height / 1.70;
    for (int l = 0; l < kNumLimbs; ++l) s.limb_radius[l] = kRadius170[l] * scale;
    return s;
}

double BodyShape::max_radius() const {
    double r = head_radius;
    for (int l = 0; l < kNumLimbs; ++l) r = std::max(r, limb_radius[l]);
    return std::max(r, torso_semi_axes.z);
}

// Forward kinematics in person space (x lateral toward the person's labeled
// left, y up, z out of the chest), then mapped into the camera frame with
// world = root + Ry(yaw) * diag(1,-1,-1) * q. Yaw 0 faces the sensor.
SkeletonPose3D pose_from_angles(const BodyShape& shape, const PoseAngles& ang) {
    auto person_point = [](const Vec3& q) { return Vec3{q.x, -q.y, -q.z}; };
    const double cy = std::cos(ang.yaw), sy = std::sin(ang.yaw);
    auto to_world = [&](const Vec3& q) {
        Vec3 m = person_point(q);
        return ang.root + Vec3{cy * m.x + sy * m.z, m.y, -sy * m.x + cy * m.z};
    };

    const double torso_len = kTorso * shape.height;
    const double cp = std::cos(ang.torso_pitch), sp = std::sin(ang.torso_pitch);
    // Torso frame: person frame pitched forward about the lateral axis.
    Basis torso{{1, 0, 0}, {0, cp, sp}, {0, -sp, cp}};

    Vec3 pelvis{0, 0, 0};
    Vec3 neck = pelvis + torso.ey * torso_len;
    std::array<Vec3, kNumJoints> p{};
    p[kNeck] = neck;

    const double hp = ang.torso_pitch + ang.head_pitch;
    p[kHead] = neck + Vec3{0, std::cos(hp), std::sin(hp)} * shape.limb_length[0];

    for (int side = 0; side < 2; ++side) {
        const double lat = side == 0 ? 1.0 : -1.0;
        const int sh = side == 0 ? kLShoulder : kRShoulder;
        const int el = side == 0 ? kLElbow : kRElbow;
        const int wr = side == 0 ? kLWrist : kRWrist;
        const int hip = side == 0 ? kLHip : kRHip;
        const int knee = side == 0 ? kLKnee : kRKnee;
        const int ankle = side == 0 ? kLAnkle : kRAnkle;

        p[sh] = neck + torso.ex * (lat * shape.shoulder_half_width);

        // Upper arm: T-pose rest, elevation drops it, swing moves it forward.
        const double e = ang.shoulder_elevation[side];
        const double sw = ang.shoulder_swing[side];
        Vec3 arm_local{lat * std::cos(e) * std::cos(sw), -std::sin(e), std::cos(e) * std::sin(sw)};
        Vec3 arm_dir = torso.apply(arm_local);
        p[el] = p[sh] + arm_dir * shape.limb_length[3];

        // Forearm: flexion about an axis orthogonal to the upper arm whose
        // orientation is itself sampled.
        Vec3 u = arm_dir.cross(torso.ez);
        if (u.norm() < 1e-9) u = arm_dir.cross(torso.ex);
        u = u.normalized();
        Vec3 v = arm_dir.cross(u);
        const double f = ang.elbow_flex[side];
        const double psi = ang.elbow_flex_axis[side];
        Vec3 fore_dir = arm_dir * std::cos(f) + (u * std::cos(psi) + v * std::sin(psi)) * std::sin(f);
        p[wr] = p[el] + fore_dir * shape.limb_length[5];

        // Legs hang from the pelvis frame; knees fold the sagittal angle back.
        p[hip] = pelvis + Vec3{lat * shape.hip_half_width, 0, 0};
        const double hf = ang.hip_flex[side];
        const double ab = ang.hip_abduct[side];
        const double ca = std::cos(ab), sa = std::sin(ab);
        auto leg_dir = [&](double sagittal) {
            Vec3 d{0, -std::cos(sagittal), std::sin(sagittal)};
            return Vec3{lat * sa * -d.y, ca * d.y, d.z};
        };
        Vec3 thigh_dir = leg_dir(hf);
        p[knee] = p[hip] + thigh_dir * shape.limb_length[9];
        Vec3 shank_dir = leg_dir(hf - ang.knee_flex[side]);
        p[ankle] = p[knee] + shank_dir * shape.limb_length[11];
    }

    SkeletonPose3D out;
    for (int j = 0; j < kNumJoints; ++j) out.joints[j] = to_world(p[j]);
    return out;
}

}  // namespace p2p
