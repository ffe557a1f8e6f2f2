// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "p2p/geometry.hpp"
#include "p2p/rng.hpp"
#include "p2p/sensor.hpp"
#include "p2p/skeleton.hpp"
#include "p2p/tensor.hpp"

namespace p2p {

// Capsule radii and segment rest lengths of one person, derived from total
// standing height. Lengths are meters.
struct BodyShape {
    double height = 1.7;
    std::array<double, kNumLimbs> limb_length{};
    std::array<double, kNumLimbs> limb_radius{};
    double hip_half_width = 0.0;       // lateral hip offset from the pelvis root
    double shoulder_half_width = 0.0;  // lateral shoulder offset from the neck
    Vec3 torso_semi_axes{};            // ellipsoid semi-axes (lateral, vertical, sagittal)
    double head_radius = 0.0;

    // Proportional template; total standing height equals `height`.
    static BodyShape from_height(double height);

    double standing_height() const { return height; }
    double max_radius() const;
};

// Camera-frame joint positions (x right, y down, z forward), meters.
struct SkeletonPose3D {
    std::array<Vec3, kNumJoints> joints{};
};

// Sampled articulation angles, radians. Rest values (all zero) give a
// standing T-pose.
struct PoseAngles {
    Vec3 root{};       // pelvis position, world frame
    double yaw = 0.0;  // rotation about the vertical; 0 faces the sensor
    double torso_pitch = 0.0;
    double head_pitch = 0.0;
    // Per side: 0 = left, 1 = right.
    std::array<double, 2> shoulder_elevation{};  // 0 = T-pose, positive lowers the arm
    std::array<double, 2> shoulder_swing{};      // positive swings forward
    std::array<double, 2> elbow_flex{};
    std::array<double, 2> elbow_flex_axis{};  // orientation of the flexion plane
    std::array<double, 2> hip_flex{};
    std::array<double, 2> hip_abduct{};
    std::array<double, 2> knee_flex{};
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

// Sampling ranges plus the working volume the pose must land in.
struct PoseConstraints {
    Range height{1.50, 1.75};
    Range root_x{-0.45, 0.45};
    Range root_y{-0.25, 0.45};  // pelvis below the optical axis reads as positive y
    Range root_z{1.15, 1.55};
    Range yaw{-1.3, 1.3};
    Range torso_pitch{-0.15, 0.35};
    Range head_pitch{-0.3, 0.3};
    Range shoulder_elevation{-0.3, 1.5};
    Range shoulder_swing{-0.9, 0.9};
    Range elbow_flex{0.0, 2.2};
    Range elbow_flex_axis{0.0, 6.283185307179586};
    Range hip_flex{-0.15, 1.2};
    Range hip_abduct{-0.1, 0.5};
    Range knee_flex{0.0, 1.9};

    // Working volume: depth range plus the sensor FOV pyramid with a margin.
    Range depth{0.5, 1.8};
    double fov_diagonal_deg = 60.0;
    double frustum_margin_m = 0.02;
    int max_attempts = 400;

    void validate() const;
};

struct PersonInstance {
    BodyShape shape;
    SkeletonPose3D pose;
};

struct Scene {
    std::vector<PersonInstance> persons;
    double background_depth = 1.8;
    double background_reflectivity = 0.5;
    double body_reflectivity = 0.8;
    double fov_diagonal_deg = 60.0;  // camera intrinsics follow the sensor FOV
};

// Forward kinematics at the given angles; no feasibility checking.
SkeletonPose3D pose_from_angles(const BodyShape& shape, const PoseAngles& angles);

// Draws angles uniformly inside the constraint ranges and rejects poses with
// joints outside the working volume. Throws ConfigError when no feasible
// pose is found within max_attempts.
SkeletonPose3D sample_pose(Pcg32& rng, const PoseConstraints& c, const BodyShape& shape);

BodyShape sample_body_shape(Pcg32& rng, const PoseConstraints& c);

// Renderable primitive set; person_id -1 marks the background plane.
struct ScenePrimitive {
    enum class Kind { kCapsule, kSphere, kEllipsoid } kind = Kind::kSphere;
    int person_id = -1;
    Vec3 a, b;           // capsule segment (a = center for spheres/ellipsoids)
    Vec3 u, v, w;        // ellipsoid axes (unit, orthogonal)
    Vec3 semi;           // ellipsoid semi-axes in (u, v, w)
    double radius = 0.;  // capsule/sphere radius
    double reflectivity = 0.8;
};

std::vector<ScenePrimitive> scene_primitives(const Scene& scene);

// Nearest hit along a unit direction from the origin; person_out is the
// primitive's person index, -1 for the background plane, -2 for no hit.
void nearest_hit(const std::vector<ScenePrimitive>& prims, double background_depth,
                 const Vec3& dir_unit, double& t_out, int& person_out,
                 double* reflectivity_out = nullptr);

// Ray-cast views of the scene plus hit bookkeeping for visibility tests.
struct HrRender {
    int size = 0;
    std::vector<double> zdepth;   // distance along the optical axis; <0 where no hit
    std::vector<double> radial;   // Euclidean ray distance; <0 where no hit
    std::vector<double> reflectivity;
    std::vector<int16_t> hit_person;  // person index, -1 background, -2 none
};

HrRender render_depth(const Scene& scene, int resolution);

// Primitive-level renderer; render_depth wraps it with scene_primitives().
HrRender render_primitives(const std::vector<ScenePrimitive>& prims, double background_depth,
                           double background_reflectivity, double fov_diagonal_deg,
                           int resolution);

HrScene to_hr_scene(const HrRender& r);

// Bicubic (Catmull-Rom, a = -0.5) downsample to 32x32. No-hit input pixels
// are replaced by `fill_depth` before filtering; the result is clamped to
// the input value range.
Tensor downsample_depth(const std::vector<double>& hr_zdepth, int hr_size, int out_size,
                        double fill_depth);

struct PersonLabel {
    std::array<double, kNumJoints> u{};
    std::array<double, kNumJoints> v{};
    std::array<uint8_t, kNumJoints> visible{};
    std::array<Vec3, kNumJoints> xyz{};
};

struct LabelSet {
    Tensor heatmaps;  // kNumJoints x S x S in [0, 1]
    Tensor pafs;      // kNumPafChannels x S x S in [-1, 1]
    Tensor depth32;   // S x S meters
    std::vector<PersonLabel> persons;
};

struct LabelConfig {
    int label_size = 32;
    double heatmap_sigma_px = 1.5;
    double paf_halfwidth_px = 1.0;
    int hr_resolution = 128;
};

// Projects joints, resolves visibility by ray casting against the scene,
// and rasterizes heatmaps / part affinity fields at label resolution.
LabelSet make_labels(const Scene& scene, const SensorConfig& sensor, const LabelConfig& lc,
                     const HrRender& render);

}  // namespace p2p
