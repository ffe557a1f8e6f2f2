// SPDX-License-Identifier: Apache-2.0
#include "p2p/dataset.hpp"

#include <cmath>

#include "p2p/common.hpp"

namespace p2p {

namespace {

Vec3 pelvis_of(const SkeletonPose3D& pose) {
    return (pose.joints[kLHip] + pose.joints[kRHip]) * 0.5;
}

}  // namespace

Scene sample_scene(Pcg32& rng, const SceneConfig& cfg, const SensorConfig& sensor, int persons) {
    require(persons >= 1 && persons <= 3, "person count must be 1..3");
    PoseConstraints constraints = cfg.constraints;
    constraints.fov_diagonal_deg = sensor.fov_diagonal_deg;
    const Camera cam = Camera::from_fov(32, sensor.fov_diagonal_deg);

    // Per-person retries cannot always separate from an awkwardly placed
    // first person, so a failed placement restarts the whole scene.
    for (int restart = 0; restart < 60; ++restart) {
        Scene scene;
        scene.background_depth = cfg.background_depth;
        scene.background_reflectivity = cfg.background_reflectivity;
        scene.body_reflectivity = cfg.body_reflectivity;
        scene.fov_diagonal_deg = sensor.fov_diagonal_deg;

        bool scene_ok = true;
        for (int p = 0; p < persons && scene_ok; ++p) {
            BodyShape shape = sample_body_shape(rng, constraints);
            bool placed = false;
            for (int attempt = 0; attempt < 25 && !placed; ++attempt) {
                SkeletonPose3D pose = sample_pose(rng, constraints, shape);
                bool ok = true;
                for (const PersonInstance& other : scene.persons) {
                    Vec3 d = pelvis_of(pose) - pelvis_of(other.pose);
                    if (d.norm() < cfg.min_root_separation_m) ok = false;
                    if (cfg.min_neck_separation_px > 0.0) {
                        double u1, v1, u2, v2;
                        cam.project(pose.joints[kNeck], u1, v1);
                        cam.project(other.pose.joints[kNeck], u2, v2);
                        double du = u1 - u2, dv = v1 - v2;
                        if (std::sqrt(du * du + dv * dv) < cfg.min_neck_separation_px) ok = false;
                    }
                }
                if (ok) {
                    scene.persons.push_back({shape, pose});
                    placed = true;
                }
            }
            scene_ok = placed;
        }
        if (scene_ok) return scene;
    }
    throw ConfigError("sample_scene: cannot separate persons within the volume");
}

Frame generate_frame(const SceneConfig& cfg, const SensorConfig& sensor, int persons,
                     uint64_t seed, uint64_t frame_index, bool validation) {
    Pcg32 scene_rng(derive_seed(seed, "scene", frame_index));
    Scene scene = sample_scene(scene_rng, cfg, sensor, persons);

    HrRender render = render_depth(scene, cfg.hr_resolution);

    LabelConfig lc;
    lc.label_size = 32;
    lc.heatmap_sigma_px = cfg.heatmap_sigma_px;
    lc.paf_halfwidth_px = cfg.paf_halfwidth_px;
    lc.hr_resolution = cfg.hr_resolution;
    LabelSet labels = make_labels(scene, sensor, lc, render);

    Pcg32 sensor_rng(derive_seed(seed, "sensor", frame_index));
    HrScene hr = to_hr_scene(render);

    Frame f;
    f.hist = simulate_histogram(hr, sensor, sensor_rng);
    f.depth32 = std::move(labels.depth32);
    f.heatmaps = std::move(labels.heatmaps);
    f.pafs = std::move(labels.pafs);
    f.persons = std::move(labels.persons);
    f.validation = validation ? 1 : 0;
    return f;
}

Dataset generate_dataset(int n_frames, int persons_per_frame, const SceneConfig& cfg,
                         const SensorConfig& sensor, uint64_t seed, int validation_frames) {
    require(n_frames > 0, "n_frames must be positive");
    require(validation_frames >= 0 && validation_frames <= n_frames,
            "validation split larger than the dataset");
    sensor.validate();

    Dataset ds;
    ds.sensor = sensor;
    ds.persons_per_frame = persons_per_frame;
    ds.frames.resize(static_cast<size_t>(n_frames));

#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n_frames; ++i) {
        ds.frames[static_cast<size_t>(i)] =
            generate_frame(cfg, sensor, persons_per_frame, seed, static_cast<uint64_t>(i),
                           i < validation_frames);
    }
    return ds;
}

}  // namespace p2p
