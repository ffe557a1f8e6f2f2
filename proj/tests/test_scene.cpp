// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "p2p/scene.hpp"

using namespace p2p;

namespace {

PoseConstraints loose_constraints() {
    PoseConstraints c;
    return c;
}

Scene one_person_scene(uint64_t seed) {
    Pcg32 rng(seed);
    PoseConstraints c;
    Scene s;
    PersonInstance p;
    p.shape = sample_body_shape(rng, c);
    p.pose = sample_pose(rng, c, p.shape);
    s.persons.push_back(p);
    return s;
}

}  // namespace

TEST_CASE("rest angles give a standing T-pose with exact segment lengths") {
    BodyShape shape = BodyShape::from_height(1.7);
    PoseAngles rest;
    rest.root = Vec3{0, 0.1, 1.4};
    SkeletonPose3D pose = pose_from_angles(shape, rest);

    // Arms horizontal, wrists at shoulder height.
    CHECK(pose.joints[kLWrist].y == doctest::Approx(pose.joints[kLShoulder].y).epsilon(1e-12));
    CHECK(pose.joints[kLWrist].x > pose.joints[kLShoulder].x);
    // Ankles straight below hips.
    CHECK(pose.joints[kLAnkle].x == doctest::Approx(pose.joints[kLHip].x));
    CHECK(pose.joints[kLAnkle].y > pose.joints[kLHip].y);  // y grows downward

    for (int l = 0; l < kNumLimbs; ++l) {
        Vec3 d = pose.joints[kLimbPairs[l].child] - pose.joints[kLimbPairs[l].parent];
        CHECK(d.norm() == doctest::Approx(shape.limb_length[l]).epsilon(1e-9));
    }
}

TEST_CASE("sampled poses are deterministic and respect limb lengths") {
    PoseConstraints c = loose_constraints();
    BodyShape shape = BodyShape::from_height(1.62);
    Pcg32 r1(8), r2(8);
    SkeletonPose3D a = sample_pose(r1, c, shape);
    SkeletonPose3D b = sample_pose(r2, c, shape);
    for (int j = 0; j < kNumJoints; ++j) {
        CHECK(a.joints[j].x == b.joints[j].x);
        CHECK(a.joints[j].y == b.joints[j].y);
        CHECK(a.joints[j].z == b.joints[j].z);
    }
}

TEST_CASE("1000 samples stay inside the working volume at exact limb lengths") {
    PoseConstraints c = loose_constraints();
    Pcg32 rng(21);
    const double tan_axis = std::tan(c.fov_diagonal_deg * 0.5 * M_PI / 180.0) / std::sqrt(2.0);
    for (int i = 0; i < 1000; ++i) {
        BodyShape shape = sample_body_shape(rng, c);
        SkeletonPose3D pose = sample_pose(rng, c, shape);
        for (int j = 0; j < kNumJoints; ++j) {
            const Vec3& q = pose.joints[j];
            CHECK(q.z >= c.depth.lo);
            CHECK(q.z <= c.depth.hi);
            CHECK(std::fabs(q.x) <= q.z * tan_axis);
            CHECK(std::fabs(q.y) <= q.z * tan_axis);
        }
        for (int l = 0; l < kNumLimbs; ++l) {
            Vec3 d = pose.joints[kLimbPairs[l].child] - pose.joints[kLimbPairs[l].parent];
            CHECK(std::fabs(d.norm() - shape.limb_length[l]) <= 0.01 * shape.limb_length[l]);
        }
    }
}

TEST_CASE("infeasible constraints raise a configuration error") {
    PoseConstraints c;
    c.root_z = {5.0, 6.0};  // far outside the depth range
    c.max_attempts = 20;
    BodyShape shape = BodyShape::from_height(1.7);
    Pcg32 rng(3);
    CHECK_THROWS_AS(sample_pose(rng, c, shape), ConfigError);
    PoseConstraints bad;
    bad.yaw = {1.0, -1.0};
    CHECK_THROWS_AS(sample_pose(rng, bad, shape), ConfigError);
}

TEST_CASE("background-only render gives plane depth and radial falloff") {
    Scene s;
    s.background_depth = 1.5;
    HrRender r = render_depth(s, 64);
    const Camera cam = Camera::from_fov(64, s.fov_diagonal_deg);
    for (int y = 0; y < 64; y += 13) {
        for (int x = 0; x < 64; x += 13) {
            size_t i = static_cast<size_t>(y) * 64 + x;
            CHECK(r.zdepth[i] == doctest::Approx(1.5).epsilon(1e-9));
            Vec3 dir = cam.ray_dir(x, y).normalized();
            CHECK(r.radial[i] == doctest::Approx(1.5 / dir.z).epsilon(1e-9));
            CHECK(r.hit_person[i] == -1);
        }
    }
}

TEST_CASE("sphere on the optical axis renders its front surface") {
    ScenePrimitive sphere;
    sphere.kind = ScenePrimitive::Kind::kSphere;
    sphere.person_id = 0;
    sphere.a = Vec3{0, 0, 1.0};
    sphere.radius = 0.1;
    HrRender r = render_primitives({sphere}, 2.5, 0.5, 60.0, 128);
    // Pixel (63,63) sits half a pixel from the principal point.
    size_t center = static_cast<size_t>(63) * 128 + 63;
    CHECK(r.zdepth[center] == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(r.hit_person[center] == 0);
    // Background pixels keep the plane depth.
    CHECK(r.zdepth[0] == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("nearer person wins overlapping pixels") {
    Scene s;
    s.background_depth = 2.2;
    Pcg32 rng(5);
    PoseConstraints c;
    PersonInstance front, back;
    front.shape = BodyShape::from_height(1.6);
    back.shape = BodyShape::from_height(1.6);
    PoseAngles rest;
    rest.root = Vec3{0, 0.15, 1.2};
    front.pose = pose_from_angles(front.shape, rest);
    rest.root = Vec3{0, 0.15, 1.7};
    back.pose = pose_from_angles(back.shape, rest);
    s.persons = {front, back};

    HrRender combined = render_depth(s, 64);
    Scene front_only = s;
    front_only.persons = {front};
    HrRender solo = render_depth(front_only, 64);

    // The nearer surface wins every overlapped pixel: wherever the front
    // person alone is hit, the combined render must agree.
    int front_hits = 0;
    for (size_t i = 0; i < combined.hit_person.size(); ++i) {
        if (solo.hit_person[i] == 0) {
            CHECK(combined.hit_person[i] == 0);
            CHECK(combined.radial[i] == doctest::Approx(solo.radial[i]).epsilon(1e-12));
            ++front_hits;
        }
    }
    CHECK(front_hits > 0);
}

TEST_CASE("bicubic downsample reproduces constants and linear ramps") {
    const int hr = 128, lo = 32;
    std::vector<double> constant(static_cast<size_t>(hr) * hr, 1.5);
    Tensor c = downsample_depth(constant, hr, lo, 2.0);
    for (int64_t i = 0; i < c.numel(); ++i) CHECK(c[i] == doctest::Approx(1.5).epsilon(1e-7));

    std::vector<double> ramp(static_cast<size_t>(hr) * hr);
    for (int y = 0; y < hr; ++y)
        for (int x = 0; x < hr; ++x) ramp[static_cast<size_t>(y) * hr + x] = 0.01 * x + 0.5;
    Tensor r = downsample_depth(ramp, hr, lo, 0.5);
    const double scale = static_cast<double>(hr) / lo;
    for (int ox = 1; ox < lo - 1; ++ox) {
        double sx = (ox + 0.5) * scale - 0.5;
        double expected = 0.01 * sx + 0.5;
        CHECK(std::fabs(r[ox] - expected) < 1e-6);
    }
}

TEST_CASE("downsample clamps ringing to the input range") {
    const int hr = 64, lo = 32;
    std::vector<double> checker(static_cast<size_t>(hr) * hr);
    for (int y = 0; y < hr; ++y)
        for (int x = 0; x < hr; ++x)
            checker[static_cast<size_t>(y) * hr + x] = ((x + y) & 1) ? 2.0 : 1.0;
    Tensor t = downsample_depth(checker, hr, lo, 1.0);
    for (int64_t i = 0; i < t.numel(); ++i) {
        CHECK(t[i] >= 1.0f);
        CHECK(t[i] <= 2.0f);
    }
}

TEST_CASE("downsample rejects non-multiple resolutions") {
    std::vector<double> v(50 * 50, 1.0);
    CHECK_THROWS_AS(downsample_depth(v, 50, 32, 1.0), ShapeError);
}

TEST_CASE("labels project, peak and orient correctly") {
    Scene s = one_person_scene(77);
    SensorConfig sensor;
    LabelConfig lc;
    HrRender render = render_depth(s, lc.hr_resolution);
    LabelSet labels = make_labels(s, sensor, lc, render);

    const Camera cam = Camera::from_fov(32, sensor.fov_diagonal_deg);
    const PersonLabel& lbl = labels.persons[0];

    int visible = 0;
    for (int j = 0; j < kNumJoints; ++j) {
        if (!lbl.visible[j]) continue;
        ++visible;
        // Heatmap argmax within 0.5 px of the projection.
        const float* plane = labels.heatmaps.data() + static_cast<int64_t>(j) * 32 * 32;
        int best = 0;
        for (int i = 1; i < 1024; ++i)
            if (plane[i] > plane[best]) best = i;
        double bu = best % 32, bv = best / 32;
        CHECK(std::fabs(bu - lbl.u[j]) <= 0.5);
        CHECK(std::fabs(bv - lbl.v[j]) <= 0.5);

        // Projection/backprojection round trip against the 3D label.
        Vec3 rec = cam.backproject(lbl.u[j], lbl.v[j], lbl.xyz[j].z);
        CHECK(std::fabs(rec.x - lbl.xyz[j].x) < 1e-9);
        CHECK(std::fabs(rec.y - lbl.xyz[j].y) < 1e-9);
    }
    CHECK(visible >= 8);  // most joints of a lone person are visible

    // PAF magnitudes never exceed one.
    for (int l = 0; l < kNumLimbs; ++l) {
        const float* px = labels.pafs.data() + static_cast<int64_t>(2 * l) * 1024;
        const float* py = labels.pafs.data() + static_cast<int64_t>(2 * l + 1) * 1024;
        for (int i = 0; i < 1024; ++i) {
            CHECK(std::sqrt(px[i] * px[i] + py[i] * py[i]) <= 1.0f + 1e-6f);
        }
    }
}

TEST_CASE("heatmap value is exactly 1 at a pixel-centered joint") {
    // Rest-pose person, root shifted so the neck lands exactly on pixel (16, 12).
    SensorConfig sensor;
    const Camera cam = Camera::from_fov(32, sensor.fov_diagonal_deg);
    Scene s;
    s.background_depth = 2.0;
    PersonInstance p;
    p.shape = BodyShape::from_height(1.55);
    PoseAngles rest;
    rest.root = Vec3{0, 0, 1.55};
    p.pose = pose_from_angles(p.shape, rest);
    Vec3 neck = p.pose.joints[kNeck];
    double u0, v0;
    cam.project(neck, u0, v0);
    Vec3 target = cam.backproject(16.0, 12.0, neck.z);
    Vec3 shift = target - neck;
    for (int j = 0; j < kNumJoints; ++j) p.pose.joints[j] = p.pose.joints[j] + shift;
    s.persons.push_back(p);

    LabelConfig lc;
    HrRender render = render_depth(s, lc.hr_resolution);
    LabelSet labels = make_labels(s, sensor, lc, render);
    const PersonLabel& lbl = labels.persons[0];
    REQUIRE(lbl.visible[kNeck] == 1);
    CHECK(lbl.u[kNeck] == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(lbl.v[kNeck] == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(labels.heatmaps[static_cast<int64_t>(kNeck) * 1024 + 12 * 32 + 16] ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("vertical limb yields a vertical unit PAF and an integral of one") {
    SensorConfig sensor;
    const Camera cam = Camera::from_fov(32, sensor.fov_diagonal_deg);
    Scene s;
    s.background_depth = 2.0;
    PersonInstance p;
    p.shape = BodyShape::from_height(1.50);
    PoseAngles rest;
    rest.root = Vec3{0, 0.10, 1.45};
    p.pose = pose_from_angles(p.shape, rest);
    s.persons.push_back(p);

    LabelConfig lc;
    HrRender render = render_depth(s, lc.hr_resolution);
    LabelSet labels = make_labels(s, sensor, lc, render);
    const PersonLabel& lbl = labels.persons[0];

    // Limb 9: left hip -> left knee, straight down in a rest pose.
    REQUIRE(lbl.visible[kLHip] == 1);
    REQUIRE(lbl.visible[kLKnee] == 1);
    const float* px = labels.pafs.data() + static_cast<int64_t>(2 * 9) * 1024;
    const float* py = labels.pafs.data() + static_cast<int64_t>(2 * 9 + 1) * 1024;

    double au = lbl.u[kLHip], av = lbl.v[kLHip];
    double bu = lbl.u[kLKnee], bv = lbl.v[kLKnee];
    CHECK(std::fabs(bu - au) < 1e-9);  // vertical in the image

    // Line integral with nearest-pixel sampling along the true limb.
    const int steps = 100;
    double integral = 0.0;
    for (int k = 0; k < steps; ++k) {
        double t = (k + 0.5) / steps;
        int ix = static_cast<int>(std::lround(au + t * (bu - au)));
        int iy = static_cast<int>(std::lround(av + t * (bv - av)));
        integral += px[iy * 32 + ix] * 0.0 + py[iy * 32 + ix] * 1.0;
    }
    integral /= steps;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("depth32 at a visible joint stays near the joint depth") {
    Scene s = one_person_scene(321);
    SensorConfig sensor;
    LabelConfig lc;
    HrRender render = render_depth(s, lc.hr_resolution);
    LabelSet labels = make_labels(s, sensor, lc, render);
    const PersonLabel& lbl = labels.persons[0];
    const double ringing = 0.05;
    for (int j = 0; j < kNumJoints; ++j) {
        if (!lbl.visible[j]) continue;
        int ix = static_cast<int>(std::lround(lbl.u[j]));
        int iy = static_cast<int>(std::lround(lbl.v[j]));
        float d = labels.depth32[static_cast<int64_t>(iy) * 32 + ix];
        CHECK(d <= lbl.xyz[j].z + s.persons[0].shape.max_radius() + ringing);
    }
}

TEST_CASE("occluded joints keep their 3D entry but lose visibility") {
    Scene s;
    s.background_depth = 2.2;
    PersonInstance front, back;
    front.shape = BodyShape::from_height(1.65);
    back.shape = BodyShape::from_height(1.65);
    PoseAngles rest;
    rest.root = Vec3{0, 0.15, 1.15};
    front.pose = pose_from_angles(front.shape, rest);
    rest.root = Vec3{0, 0.15, 1.75};
    back.pose = pose_from_angles(back.shape, rest);
    s.persons = {front, back};

    SensorConfig sensor;
    LabelConfig lc;
    HrRender render = render_depth(s, lc.hr_resolution);
    LabelSet labels = make_labels(s, sensor, lc, render);

    const PersonLabel& hidden = labels.persons[1];
    int hidden_visible = 0;
    for (int j = 0; j < kNumJoints; ++j) {
        hidden_visible += hidden.visible[j];
        CHECK(hidden.xyz[j].z == doctest::Approx(back.pose.joints[j].z));
    }
    CHECK(hidden_visible <= 2);  // nearly everything is eclipsed
}
