// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace p2p {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0, 0, 0};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Pinhole camera over a square SxS grid. Camera frame: x right, y down,
// z along the optical axis. Pixel centers sit at integer coordinates
// 0..S-1, principal point at the grid center (S-1)/2. The focal length
// comes from the diagonal field of view: the grid diagonal spans
// S*sqrt(2)/2 pixels from the center, seen under half the diagonal FOV.
struct Camera {
    int size = 32;
    double focal_px = 0.0;
    double center = 0.0;

    static Camera from_fov(int size, double fov_diag_deg) {
        Camera c;
        c.size = size;
        double half = fov_diag_deg * 0.5 * M_PI / 180.0;
        c.focal_px = (size * std::sqrt(2.0) / 2.0) / std::tan(half);
        c.center = (size - 1) * 0.5;
        return c;
    }

    // Unnormalized ray direction through pixel coordinate (u, v).
    Vec3 ray_dir(double u, double v) const {
        return Vec3{(u - center) / focal_px, (v - center) / focal_px, 1.0};
    }

    // Projects a camera-frame point; valid for z > 0.
    void project(const Vec3& p, double& u, double& v) const {
        u = focal_px * p.x / p.z + center;
        v = focal_px * p.y / p.z + center;
    }

    Vec3 backproject(double u, double v, double z) const {
        return Vec3{(u - center) * z / focal_px, (v - center) * z / focal_px, z};
    }
};

// Ray-primitive intersections. Rays have unit direction, so the returned t
// is the radial (Euclidean) distance. Negative return means no hit.

inline double intersect_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center,
                               double radius) {
    Vec3 oc = origin - center;
    double b = oc.dot(dir);
    double c = oc.dot(oc) - radius * radius;
    double disc = b * b - c;
    if (disc < 0.0) return -1.0;
    double s = std::sqrt(disc);
    double t = -b - s;
    if (t > 1e-9) return t;
    t = -b + s;
    return t > 1e-9 ? t : -1.0;
}

// Capsule = cylinder of the given radius around segment [a, b] with
// spherical caps.
double intersect_capsule(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                         double radius);

// Axis-aligned ellipsoid centered at c with semi-axes (ax, ay, az).
inline double intersect_ellipsoid(const Vec3& origin, const Vec3& dir, const Vec3& c, double ax,
                                  double ay, double az) {
    Vec3 o{(origin.x - c.x) / ax, (origin.y - c.y) / ay, (origin.z - c.z) / az};
    Vec3 d{dir.x / ax, dir.y / ay, dir.z / az};
    double A = d.dot(d);
    double B = o.dot(d);
    double C = o.dot(o) - 1.0;
    double disc = B * B - A * C;
    if (disc < 0.0) return -1.0;
    double s = std::sqrt(disc);
    double t = (-B - s) / A;
    if (t > 1e-9) return t;
    t = (-B + s) / A;
    return t > 1e-9 ? t : -1.0;
}

// Plane z = depth (normal along the optical axis).
inline double intersect_plane_z(const Vec3& origin, const Vec3& dir, double depth) {
    if (dir.z <= 1e-12) return -1.0;
    double t = (depth - origin.z) / dir.z;
    return t > 1e-9 ? t : -1.0;
}

}  // namespace p2p
