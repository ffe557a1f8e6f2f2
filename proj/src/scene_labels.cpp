// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/scene.hpp"

namespace p2p {

namespace {

// Distance from a point to a 2D segment.
double point_segment_dist(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 1e-12) t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
    double cx = ax + t * dx - px;
    double cy = ay + t * dy - py;
    return std::sqrt(cx * cx + cy * cy);
}

}  // namespace

LabelSet make_labels(const Scene& scene, const SensorConfig& sensor, const LabelConfig& lc,
                     const HrRender& render) {
    const int S = lc.label_size;
    const Camera cam = Camera::from_fov(S, sensor.fov_diagonal_deg);
    const std::vector<ScenePrimitive> prims = scene_primitives(scene);

    LabelSet out;
    out.heatmaps = Tensor({kNumJoints, S, S});
    out.pafs = Tensor({kNumPafChannels, S, S});
    out.depth32 = downsample_depth(render.zdepth, render.size, S, scene.background_depth);
    out.persons.resize(scene.persons.size());

    // Projection and visibility. A joint is visible when the nearest surface
    // at its projection belongs to its own person: another person or the
    // background in front hides it, while self-occlusion keeps the label,
    // matching how RGB-based 2D labeling behaves.
    for (size_t pi = 0; pi < scene.persons.size(); ++pi) {
        const PersonInstance& person = scene.persons[pi];
        PersonLabel& lbl = out.persons[pi];
        for (int j = 0; j < kNumJoints; ++j) {
            const Vec3& q = person.pose.joints[j];
            lbl.xyz[j] = q;
            if (q.z <= 1e-6) continue;
            double u, v;
            cam.project(q, u, v);
            lbl.u[j] = u;
            lbl.v[j] = v;
            if (u < 0.0 || u > S - 1 || v < 0.0 || v > S - 1) continue;
            double t;
            int who;
            nearest_hit(prims, scene.background_depth, cam.ray_dir(u, v).normalized(), t, who);
            if (who == static_cast<int>(pi) && t > 0.0) lbl.visible[j] = 1;
        }
    }

    // Heatmaps: per joint type, max over persons of a unit Gaussian at the
    // projected location. Only visible joints contribute.
    const double inv_two_sigma2 = 1.0 / (2.0 * lc.heatmap_sigma_px * lc.heatmap_sigma_px);
    for (int j = 0; j < kNumJoints; ++j) {
        float* plane = out.heatmaps.data() + static_cast<int64_t>(j) * S * S;
        for (const PersonLabel& lbl : out.persons) {
            if (!lbl.visible[j]) continue;
            for (int y = 0; y < S; ++y) {
                for (int x = 0; x < S; ++x) {
                    double du = x - lbl.u[j];
                    double dv = y - lbl.v[j];
                    float g = static_cast<float>(std::exp(-(du * du + dv * dv) * inv_two_sigma2));
                    float& cell = plane[y * S + x];
                    cell = std::max(cell, g);
                }
            }
        }
    }

    // PAFs: unit limb direction on pixels within paf_halfwidth of the limb
    // segment; overlapping persons are averaged, then clamped to unit norm.
    std::vector<int> counts(static_cast<size_t>(S) * S);
    for (int l = 0; l < kNumLimbs; ++l) {
        float* px_plane = out.pafs.data() + static_cast<int64_t>(2 * l) * S * S;
        float* py_plane = out.pafs.data() + static_cast<int64_t>(2 * l + 1) * S * S;
        std::fill(counts.begin(), counts.end(), 0);
        for (const PersonLabel& lbl : out.persons) {
            int ja = kLimbPairs[l].parent, jb = kLimbPairs[l].child;
            if (!lbl.visible[ja] || !lbl.visible[jb]) continue;
            double ax = lbl.u[ja], ay = lbl.v[ja];
            double bx = lbl.u[jb], by = lbl.v[jb];
            double dx = bx - ax, dy = by - ay;
            double len = std::sqrt(dx * dx + dy * dy);
            if (len < 1e-9) continue;
            dx /= len;
            dy /= len;
            int x_lo = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - lc.paf_halfwidth_px)));
            int x_hi = std::min(S - 1, static_cast<int>(std::ceil(std::max(ax, bx) + lc.paf_halfwidth_px)));
            int y_lo = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - lc.paf_halfwidth_px)));
            int y_hi = std::min(S - 1, static_cast<int>(std::ceil(std::max(ay, by) + lc.paf_halfwidth_px)));
            for (int y = y_lo; y <= y_hi; ++y) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    if (point_segment_dist(x, y, ax, ay, bx, by) > lc.paf_halfwidth_px) continue;
                    px_plane[y * S + x] += static_cast<float>(dx);
                    py_plane[y * S + x] += static_cast<float>(dy);
                    counts[static_cast<size_t>(y) * S + x] += 1;
                }
            }
        }
        for (int i = 0; i < S * S; ++i) {
            if (counts[static_cast<size_t>(i)] > 1) {
                px_plane[i] /= counts[static_cast<size_t>(i)];
                py_plane[i] /= counts[static_cast<size_t>(i)];
            }
            float norm = std::sqrt(px_plane[i] * px_plane[i] + py_plane[i] * py_plane[i]);
            if (norm > 1.0f) {
                px_plane[i] /= norm;
                py_plane[i] /= norm;
            }
        }
    }
    return out;
}

}  // namespace p2p
