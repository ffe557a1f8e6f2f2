// SPDX-License-Identifier: Apache-2.0
#include "p2p/decode.hpp"

#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"

namespace p2p {

namespace {

// Quadratic vertex offset from three samples; clamped to half a pixel.
double subpixel_offset(double left, double center, double right) {
    const double denom = left - 2.0 * center + right;
    if (std::fabs(denom) < 1e-12) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

double bilinear(const float* plane, int size, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(size - 1));
    y = std::clamp(y, 0.0, static_cast<double>(size - 1));
    const int x0 = std::min(static_cast<int>(x), size - 2 >= 0 ? size - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), size - 2 >= 0 ? size - 2 : 0);
    const double fx = x - x0, fy = y - y0;
    const float* r0 = plane + static_cast<int64_t>(y0) * size;
    const float* r1 = plane + static_cast<int64_t>(std::min(y0 + 1, size - 1)) * size;
    const int x1 = std::min(x0 + 1, size - 1);
    return (r0[x0] * (1 - fx) + r0[x1] * fx) * (1 - fy) + (r1[x0] * (1 - fx) + r1[x1] * fx) * fy;
}

}  // namespace

std::vector<Keypoint2D> extract_peaks(const float* heatmap, int size, const DecodeConfig& cfg) {
    std::vector<Keypoint2D> peaks;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const float v = heatmap[y * size + x];
            if (!(v >= cfg.peak_threshold)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= size || ny < 0 || ny >= size) continue;
                    if (heatmap[ny * size + nx] >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;
            Keypoint2D kp;
            kp.u = x;
            kp.v = y;
            kp.score = v;
            if (x > 0 && x < size - 1) {
                kp.u += subpixel_offset(heatmap[y * size + x - 1], v, heatmap[y * size + x + 1]);
            }
            if (y > 0 && y < size - 1) {
                kp.v += subpixel_offset(heatmap[(y - 1) * size + x], v, heatmap[(y + 1) * size + x]);
            }
            peaks.push_back(kp);
        }
    }
    // Row-major scan gives the deterministic tie order; stable sort by score.
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Keypoint2D& a, const Keypoint2D& b) { return a.score > b.score; });
    if (static_cast<int>(peaks.size()) > cfg.max_peaks_per_joint) {
        peaks.resize(static_cast<size_t>(cfg.max_peaks_per_joint));
    }
    return peaks;
}

double score_limb(const Tensor& pafs, int size, const Keypoint2D& a, const Keypoint2D& b, int limb,
                  const DecodeConfig& cfg) {
    const double dx = b.u - a.u, dy = b.v - a.v;
    const double len = std::sqrt(dx * dx + dy * dy);
    if (len < 1e-9) return -1.0;
    const double ux = dx / len, uy = dy / len;
    const float* px = pafs.data() + static_cast<int64_t>(2 * limb) * size * size;
    const float* py = pafs.data() + static_cast<int64_t>(2 * limb + 1) * size * size;

    int good = 0;
    double sum = 0.0;
    for (int k = 0; k < cfg.paf_samples; ++k) {
        const double t = cfg.paf_samples > 1 ? static_cast<double>(k) / (cfg.paf_samples - 1) : 0.5;
        const double sx = a.u + t * dx, sy = a.v + t * dy;
        const double dot = bilinear(px, size, sx, sy) * ux + bilinear(py, size, sx, sy) * uy;
        sum += dot;
        if (dot > cfg.paf_min_dot) ++good;
    }
    if (good < cfg.paf_min_good) return -1.0;
    return sum / cfg.paf_samples;
}

std::vector<Skeleton2D> assemble_skeletons(
    const std::array<std::vector<Keypoint2D>, kNumJoints>& keypoints, const Tensor& pafs, int size,
    const DecodeConfig& cfg) {
    // Accepted limb connections, per limb type.
    struct Accepted {
        int limb, a, b;
        double score;
    };
    std::vector<Accepted> accepted;

    for (int limb = 0; limb < kNumLimbs; ++limb) {
        const auto& as = keypoints[static_cast<size_t>(kLimbPairs[limb].parent)];
        const auto& bs = keypoints[static_cast<size_t>(kLimbPairs[limb].child)];
        if (as.empty() || bs.empty()) continue;
        std::vector<LimbCandidate> cands;
        for (int i = 0; i < static_cast<int>(as.size()); ++i) {
            for (int j = 0; j < static_cast<int>(bs.size()); ++j) {
                const double s = score_limb(pafs, size, as[static_cast<size_t>(i)],
                                            bs[static_cast<size_t>(j)], limb, cfg);
                if (s > -1.0) cands.push_back({limb, i, j, s});
            }
        }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const LimbCandidate& a, const LimbCandidate& b) {
                             return a.score > b.score;
                         });
        std::vector<bool> used_a(as.size(), false), used_b(bs.size(), false);
        for (const LimbCandidate& c : cands) {
            if (used_a[static_cast<size_t>(c.a)] || used_b[static_cast<size_t>(c.b)]) continue;
            used_a[static_cast<size_t>(c.a)] = true;
            used_b[static_cast<size_t>(c.b)] = true;
            accepted.push_back({c.limb, c.a, c.b, c.score});
        }
    }

    // Merge limbs sharing keypoints into skeletons. Keys are (joint type,
    // keypoint index); a merge that would duplicate a joint type rejects the
    // offending limb so no keypoint is shared between skeletons.
    struct Build {
        Skeleton2D skel;
        double limb_score_sum = 0.0;
        int limbs = 0;
        bool alive = true;
    };
    std::vector<Build> builds;
    std::vector<int> owner(static_cast<size_t>(kNumJoints) * 64, -1);
    auto key = [](int joint, int idx) { return joint * 64 + idx; };

    for (const Accepted& limb : accepted) {
        const int ja = kLimbPairs[limb.limb].parent;
        const int jb = kLimbPairs[limb.limb].child;
        int oa = owner[static_cast<size_t>(key(ja, limb.a))];
        int ob = owner[static_cast<size_t>(key(jb, limb.b))];

        auto attach = [&](Build& bld) {
            bld.skel.keypoint[ja] = limb.a;
            bld.skel.keypoint[jb] = limb.b;
            bld.limb_score_sum += limb.score;
            bld.limbs += 1;
            owner[static_cast<size_t>(key(ja, limb.a))] =
                static_cast<int>(&bld - builds.data());
            owner[static_cast<size_t>(key(jb, limb.b))] =
                static_cast<int>(&bld - builds.data());
        };

        if (oa < 0 && ob < 0) {
            builds.emplace_back();
            attach(builds.back());
        } else if (oa >= 0 && ob < 0) {
            if (builds[static_cast<size_t>(oa)].skel.keypoint[jb] != -1) continue;
            attach(builds[static_cast<size_t>(oa)]);
        } else if (ob >= 0 && oa < 0) {
            if (builds[static_cast<size_t>(ob)].skel.keypoint[ja] != -1) continue;
            attach(builds[static_cast<size_t>(ob)]);
        } else if (oa == ob) {
            builds[static_cast<size_t>(oa)].limb_score_sum += limb.score;
            builds[static_cast<size_t>(oa)].limbs += 1;
        } else {
            // Merge the two builds unless they conflict on any joint type.
            Build& A = builds[static_cast<size_t>(oa)];
            Build& B = builds[static_cast<size_t>(ob)];
            bool conflict = false;
            for (int j = 0; j < kNumJoints; ++j) {
                if (A.skel.keypoint[j] != -1 && B.skel.keypoint[j] != -1) {
                    conflict = true;
                    break;
                }
            }
            if (conflict) continue;
            for (int j = 0; j < kNumJoints; ++j) {
                if (B.skel.keypoint[j] != -1) {
                    A.skel.keypoint[j] = B.skel.keypoint[j];
                    owner[static_cast<size_t>(key(j, B.skel.keypoint[j]))] = oa;
                }
            }
            A.limb_score_sum += B.limb_score_sum + limb.score;
            A.limbs += B.limbs + 1;
            B.alive = false;
        }
    }

    std::vector<Skeleton2D> out;
    for (const Build& b : builds) {
        if (!b.alive) continue;
        Skeleton2D s = b.skel;
        s.joints_found = 0;
        for (int j = 0; j < kNumJoints; ++j) {
            if (s.keypoint[j] < 0) continue;
            const Keypoint2D& kp =
                keypoints[static_cast<size_t>(j)][static_cast<size_t>(s.keypoint[j])];
            s.u[j] = kp.u;
            s.v[j] = kp.v;
            s.score[j] = kp.score;
            s.joints_found += 1;
        }
        if (s.joints_found < cfg.min_joints) continue;
        s.person_score = b.limbs > 0 ? b.limb_score_sum / b.limbs : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Skeleton2D> decode_pose_maps(const Tensor& heatmaps, const Tensor& pafs,
                                         const DecodeConfig& cfg) {
    require_shape(heatmaps.rank() >= 3 && heatmaps.dim(heatmaps.rank() - 3) == kNumJoints,
                  "decode: heatmaps must be 14xSxS");
    const int size = static_cast<int>(heatmaps.dim(heatmaps.rank() - 1));
    require_shape(pafs.numel() == static_cast<int64_t>(kNumPafChannels) * size * size,
                  "decode: pafs must be 26xSxS");
    std::array<std::vector<Keypoint2D>, kNumJoints> kps;
    for (int j = 0; j < kNumJoints; ++j) {
        kps[static_cast<size_t>(j)] =
            extract_peaks(heatmaps.data() + static_cast<int64_t>(j) * size * size, size, cfg);
        for (Keypoint2D& kp : kps[static_cast<size_t>(j)]) kp.joint = j;
    }
    return assemble_skeletons(kps, pafs, size, cfg);
}

Skeleton3D lift_to_3d(const Skeleton2D& s, const Tensor& depth32, const DecodeConfig& cfg) {
    require_shape(depth32.numel() == 1024, "lift_to_3d: depth map must be 32x32");
    const Camera cam = Camera::from_fov(32, cfg.fov_diagonal_deg);
    Skeleton3D out;
    out.score = s.person_score;
    for (int j = 0; j < kNumJoints; ++j) {
        if (s.keypoint[j] < 0) continue;
        const int cu = std::clamp(static_cast<int>(std::lround(s.u[j])), 0, 31);
        const int cv = std::clamp(static_cast<int>(std::lround(s.v[j])), 0, 31);
        // Lower median of the clipped 3x3 window: a real measured depth,
        // robust to the peak landing one pixel off a thin limb.
        double window[9];
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cu + dx, y = cv + dy;
                if (x < 0 || x >= 32 || y < 0 || y >= 32) continue;
                window[n++] = depth32[y * 32 + x];
            }
        }
        std::sort(window, window + n);
        const double z = window[(n - 1) / 2];
        out.joints[j].valid = true;
        out.joints[j].xyz = cam.backproject(s.u[j], s.v[j], z);
    }
    return out;
}

std::vector<int> match_to_ground_truth(const std::vector<Skeleton3D>& predicted,
                                       const std::vector<Skeleton3D>& truth) {
    const int nt = static_cast<int>(truth.size());
    const int np = static_cast<int>(predicted.size());
    std::vector<int> best_assign(static_cast<size_t>(nt), -1);
    if (nt == 0) return best_assign;

    constexpr double kMissCost = 1e6;
    auto pair_cost = [&](int t, int p) {
        const Joint3D& tn = truth[static_cast<size_t>(t)].joints[kNeck];
        const Joint3D& pn = predicted[static_cast<size_t>(p)].joints[kNeck];
        if (!tn.valid || !pn.valid) return kMissCost;
        return (tn.xyz - pn.xyz).norm();
    };

    // Exhaustive over assignments (at most 3 persons per side): each truth
    // takes an unused prediction or stays unmatched at a large miss cost.
    double best_cost = 1e300;
    std::vector<int> choice(static_cast<size_t>(nt), -1);
    std::vector<bool> used(static_cast<size_t>(np), false);
    auto recurse = [&](auto&& self, int t, double cost) -> void {
        if (cost >= best_cost) return;
        if (t == nt) {
            best_cost = cost;
            best_assign = choice;
            return;
        }
        for (int p = 0; p < np; ++p) {
            if (used[static_cast<size_t>(p)]) continue;
            used[static_cast<size_t>(p)] = true;
            choice[static_cast<size_t>(t)] = p;
            self(self, t + 1, cost + pair_cost(t, p));
            used[static_cast<size_t>(p)] = false;
        }
        choice[static_cast<size_t>(t)] = -1;
        self(self, t + 1, cost + kMissCost);
    };
    recurse(recurse, 0, 0.0);
    return best_assign;
}

}  // namespace p2p
