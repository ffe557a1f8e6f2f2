// SPDX-License-Identifier: Apache-2.0
#include "p2p/geometry.hpp"

#include <algorithm>

namespace p2p {

double intersect_capsule(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                         double radius) {
    Vec3 ba = b - a;
    double len2 = ba.dot(ba);
    if (len2 < 1e-18) return intersect_sphere(origin, dir, a, radius);

    // Infinite-cylinder quadratic in the frame of the segment axis.
    Vec3 oa = origin - a;
    double axis_d = dir.dot(ba);
    double axis_o = oa.dot(ba);
    double A = len2 - axis_d * axis_d;
    double B = len2 * oa.dot(dir) - axis_o * axis_d;
    double C = len2 * (oa.dot(oa) - radius * radius) - axis_o * axis_o;

    double best = -1.0;
    if (A > 1e-15) {
        double disc = B * B - A * C;
        if (disc >= 0.0) {
            double s = std::sqrt(disc);
            for (double t : {(-B - s) / A, (-B + s) / A}) {
                if (t <= 1e-9) continue;
                double h = axis_o + t * axis_d;  // position along axis, scaled by len2
                if (h >= 0.0 && h <= len2) {
                    best = (best < 0.0) ? t : std::min(best, t);
                    break;  // the nearer root on the finite body wins
                }
            }
        }
    }
    for (const Vec3& cap : {a, b}) {
        double t = intersect_sphere(origin, dir, cap, radius);
        if (t > 0.0 && (best < 0.0 || t < best)) best = t;
    }
    return best;
}

}  // namespace p2p
