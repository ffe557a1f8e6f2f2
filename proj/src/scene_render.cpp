// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/scene.hpp"

namespace p2p {

std::vector<ScenePrimitive> scene_primitives(const Scene& scene) {
    std::vector<ScenePrimitive> prims;
    prims.reserve(scene.persons.size() * (kNumLimbs + 2));
    for (size_t pi = 0; pi < scene.persons.size(); ++pi) {
        const PersonInstance& person = scene.persons[pi];
        const auto& joints = person.pose.joints;

        for (int l = 0; l < kNumLimbs; ++l) {
            ScenePrimitive p;
            p.kind = ScenePrimitive::Kind::kCapsule;
            p.person_id = static_cast<int>(pi);
            p.a = joints[kLimbPairs[l].parent];
            p.b = joints[kLimbPairs[l].child];
            p.radius = person.shape.limb_radius[l];
            p.reflectivity = scene.body_reflectivity;
            prims.push_back(p);
        }

        ScenePrimitive head;
        head.kind = ScenePrimitive::Kind::kSphere;
        head.person_id = static_cast<int>(pi);
        head.a = joints[kHead];
        head.radius = person.shape.head_radius;
        head.reflectivity = scene.body_reflectivity;
        prims.push_back(head);

        // Torso ellipsoid spans pelvis to neck; its frame follows the torso.
        // The pelvis is recovered from the two hip joints.
        ScenePrimitive torso;
        torso.kind = ScenePrimitive::Kind::kEllipsoid;
        torso.person_id = static_cast<int>(pi);
        Vec3 pelvis = (joints[kLHip] + joints[kRHip]) * 0.5;
        Vec3 neck = joints[kNeck];
        torso.a = (pelvis + neck) * 0.5;
        Vec3 up = (neck - pelvis).normalized();
        Vec3 lat = (joints[kLHip] - joints[kRHip]).normalized();
        Vec3 sag = lat.cross(up).normalized();
        lat = up.cross(sag);
        torso.u = lat;
        torso.v = up;
        torso.w = sag;
        torso.semi = person.shape.torso_semi_axes;
        torso.reflectivity = scene.body_reflectivity;
        prims.push_back(torso);
    }
    return prims;
}

namespace {

double hit_primitive(const ScenePrimitive& p, const Vec3& origin, const Vec3& dir) {
    switch (p.kind) {
        case ScenePrimitive::Kind::kCapsule:
            return intersect_capsule(origin, dir, p.a, p.b, p.radius);
        case ScenePrimitive::Kind::kSphere:
            return intersect_sphere(origin, dir, p.a, p.radius);
        case ScenePrimitive::Kind::kEllipsoid: {
            Vec3 rel = origin - p.a;
            Vec3 o{rel.dot(p.u), rel.dot(p.v), rel.dot(p.w)};
            Vec3 d{dir.dot(p.u), dir.dot(p.v), dir.dot(p.w)};
            return intersect_ellipsoid(o, d, Vec3{0, 0, 0}, p.semi.x, p.semi.y, p.semi.z);
        }
    }
    return -1.0;
}

}  // namespace

// Nearest hit over the primitive list, exposed for label visibility tests.
void nearest_hit(const std::vector<ScenePrimitive>& prims, double background_depth,
                 const Vec3& dir_unit, double& t_out, int& person_out, double* reflectivity_out) {
    double best = -1.0;
    int who = -2;
    double refl = 0.0;
    for (const ScenePrimitive& p : prims) {
        double t = hit_primitive(p, Vec3{0, 0, 0}, dir_unit);
        if (t > 0.0 && (best < 0.0 || t < best)) {
            best = t;
            who = p.person_id;
            refl = p.reflectivity;
        }
    }
    double tp = intersect_plane_z(Vec3{0, 0, 0}, dir_unit, background_depth);
    if (tp > 0.0 && (best < 0.0 || tp < best)) {
        best = tp;
        who = -1;
        refl = -1.0;  // caller substitutes the background reflectivity
    }
    t_out = best;
    person_out = who;
    if (reflectivity_out) *reflectivity_out = refl;
}

HrRender render_primitives(const std::vector<ScenePrimitive>& prims, double background_depth,
                           double background_reflectivity, double fov_diagonal_deg,
                           int resolution) {
    require_shape(resolution > 0, "render resolution must be positive");
    HrRender r;
    r.size = resolution;
    const size_t n = static_cast<size_t>(resolution) * resolution;
    r.zdepth.assign(n, -1.0);
    r.radial.assign(n, -1.0);
    r.reflectivity.assign(n, 0.0);
    r.hit_person.assign(n, -2);

    const Camera cam = Camera::from_fov(resolution, fov_diagonal_deg);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < resolution; ++y) {
        for (int x = 0; x < resolution; ++x) {
            Vec3 dir = cam.ray_dir(x, y).normalized();
            double t;
            int who;
            double refl;
            nearest_hit(prims, background_depth, dir, t, who, &refl);
            if (t <= 0.0) continue;
            size_t i = static_cast<size_t>(y) * resolution + x;
            r.radial[i] = t;
            r.zdepth[i] = t * dir.z;
            r.hit_person[i] = static_cast<int16_t>(who);
            r.reflectivity[i] = who >= 0 ? refl : background_reflectivity;
        }
    }
    return r;
}

HrRender render_depth(const Scene& scene, int resolution) {
    return render_primitives(scene_primitives(scene), scene.background_depth,
                             scene.background_reflectivity, scene.fov_diagonal_deg, resolution);
}

HrScene to_hr_scene(const HrRender& r) {
    HrScene s;
    s.size = r.size;
    s.radial = r.radial;
    s.reflectivity = r.reflectivity;
    return s;
}

namespace {

// Catmull-Rom kernel (a = -0.5).
double cubic_weight(double t) {
    t = std::fabs(t);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

}  // namespace

Tensor downsample_depth(const std::vector<double>& hr_zdepth, int hr_size, int out_size,
                        double fill_depth) {
    require_shape(hr_size > 0 && out_size > 0 && hr_size % out_size == 0,
                  "downsample: input resolution must be an integer multiple of the output");
    require_shape(hr_zdepth.size() == static_cast<size_t>(hr_size) * hr_size,
                  "downsample: input size mismatch");

    std::vector<double> filled(hr_zdepth);
    double in_min = 1e300, in_max = -1e300;
    for (double& v : filled) {
        if (v < 0.0) v = fill_depth;
        in_min = std::min(in_min, v);
        in_max = std::max(in_max, v);
    }

    const double scale = static_cast<double>(hr_size) / out_size;
    Tensor out({out_size, out_size});
    for (int oy = 0; oy < out_size; ++oy) {
        double sy = (oy + 0.5) * scale - 0.5;
        int iy = static_cast<int>(std::floor(sy));
        for (int ox = 0; ox < out_size; ++ox) {
            double sx = (ox + 0.5) * scale - 0.5;
            int ix = static_cast<int>(std::floor(sx));
            double acc = 0.0;
            for (int j = -1; j <= 2; ++j) {
                int yy = std::clamp(iy + j, 0, hr_size - 1);
                double wy = cubic_weight(sy - (iy + j));
                double row = 0.0;
                for (int i = -1; i <= 2; ++i) {
                    int xx = std::clamp(ix + i, 0, hr_size - 1);
                    row += cubic_weight(sx - (ix + i)) * filled[static_cast<size_t>(yy) * hr_size + xx];
                }
                acc += wy * row;
            }
            out[static_cast<int64_t>(oy) * out_size + ox] =
                static_cast<float>(std::clamp(acc, in_min, in_max));
        }
    }
    return out;
}

}  // namespace p2p
