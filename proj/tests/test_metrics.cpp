// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "p2p/metrics.hpp"
#include "p2p/rng.hpp"

using namespace p2p;

namespace {

JointErrorRecord rec(double ex, double ey, double ez, int group = 0, bool matched = true) {
    JointErrorRecord r;
    r.group = group;
    r.matched = matched;
    r.ex_cm = ex;
    r.ey_cm = ey;
    r.ez_cm = ez;
    r.euclidean_cm = std::sqrt(ex * ex + ey * ey + ez * ez);
    return r;
}

Skeleton3D skeleton_at(const Vec3& neck, double spread) {
    Skeleton3D s;
    for (int j = 0; j < kNumJoints; ++j) {
        s.joints[j].valid = true;
        s.joints[j].xyz = neck + Vec3{spread * (j % 3 - 1), spread * (j % 5 - 2) * 0.5, 0.05 * j};
    }
    return s;
}

}  // namespace

TEST_CASE("rmse_axis hand cases") {
    CHECK(rmse_axis({rec(0, 0, 0), rec(0, 1, 2)}, 0) == doctest::Approx(0.0));
    CHECK(rmse_axis({rec(0, 0, 0), rec(2, 0, 0)}, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(rmse_axis({}, 0), DomainError);
    CHECK_THROWS_AS(rmse_axis({rec(0, 0, 0, 0, false)}, 0), DomainError);
}

TEST_CASE("average_error hand cases") {
    CHECK(average_error({rec(3, 4, 0)}) == doctest::Approx(5.0));
    CHECK(average_error({rec(0, 0, 0), rec(0, 0, 0)}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(average_error({}), DomainError);
}

TEST_CASE("pck counts strictly-below distances; missed joints fail") {
    std::vector<JointErrorRecord> rs{rec(10, 0, 0), rec(20, 0, 0), rec(25, 0, 0)};
    CHECK(pck(rs, 15.0) == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
    CHECK(pck({rec(15, 0, 0)}, 15.0) == doctest::Approx(0.0));  // "below 15" is strict
    CHECK(pck({rec(14.999, 0, 0)}, 15.0) == doctest::Approx(100.0));

    std::vector<JointErrorRecord> with_miss{rec(1, 0, 0), rec(0, 0, 0, 0, false)};
    CHECK(pck(with_miss, 15.0) == doctest::Approx(50.0));
    CHECK_THROWS_AS(pck({}, 15.0), DomainError);
}

TEST_CASE("pck is monotone in the threshold") {
    Pcg32 rng(3);
    std::vector<JointErrorRecord> rs;
    for (int i = 0; i < 500; ++i) {
        rs.push_back(rec(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30)));
    }
    CHECK(pck(rs, 15.0) <= pck(rs, 20.0));
    CHECK(pck(rs, 20.0) <= pck(rs, 30.0));
}

TEST_CASE("per-record euclidean dominates each axis magnitude") {
    Pcg32 rng(5);
    for (int i = 0; i < 1000; ++i) {
        JointErrorRecord r = rec(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20));
        CHECK(r.euclidean_cm >= std::fabs(r.ex_cm) - 1e-12);
        CHECK(r.euclidean_cm >= std::fabs(r.ey_cm) - 1e-12);
        CHECK(r.euclidean_cm >= std::fabs(r.ez_cm) - 1e-12);
    }
}

TEST_CASE("statistics match a brute-force recomputation to 1e-9") {
    Pcg32 rng(17);
    std::vector<JointErrorRecord> rs;
    for (int i = 0; i < 10000; ++i) {
        JointErrorRecord r = rec(rng.uniform(-25, 25), rng.uniform(-25, 25), rng.uniform(-25, 25),
                                 static_cast<int>(rng.next_below(kNumJointGroups)));
        if (rng.next_below(10) == 0) {
            r.matched = false;
            r.ex_cm = r.ey_cm = r.ez_cm = r.euclidean_cm = 0.0;
        }
        rs.push_back(r);
    }

    // Straight-line reimplementation of every statistic.
    double sx = 0, sy = 0, sz = 0, se = 0;
    int64_t matched = 0, total = 0;
    int64_t hits15 = 0, hits20 = 0, hits30 = 0;
    for (const JointErrorRecord& r : rs) {
        ++total;
        if (!r.matched) continue;
        ++matched;
        sx += r.ex_cm * r.ex_cm;
        sy += r.ey_cm * r.ey_cm;
        sz += r.ez_cm * r.ez_cm;
        double e = std::sqrt(r.ex_cm * r.ex_cm + r.ey_cm * r.ey_cm + r.ez_cm * r.ez_cm);
        se += e;
        hits15 += e < 15.0;
        hits20 += e < 20.0;
        hits30 += e < 30.0;
    }
    CHECK(std::fabs(rmse_axis(rs, 0) - std::sqrt(sx / matched)) < 1e-9);
    CHECK(std::fabs(rmse_axis(rs, 1) - std::sqrt(sy / matched)) < 1e-9);
    CHECK(std::fabs(rmse_axis(rs, 2) - std::sqrt(sz / matched)) < 1e-9);
    CHECK(std::fabs(average_error(rs) - se / matched) < 1e-9);
    CHECK(std::fabs(pck(rs, 15.0) - 100.0 * hits15 / total) < 1e-9);
    CHECK(std::fabs(pck(rs, 20.0) - 100.0 * hits20 / total) < 1e-9);
    CHECK(std::fabs(pck(rs, 30.0) - 100.0 * hits30 / total) < 1e-9);

    // The pooled report agrees with group-wise brute force as well.
    EvalReport rep = report_from_records(rs);
    for (int g = 0; g < kNumJointGroups; ++g) {
        std::vector<JointErrorRecord> sub;
        for (const auto& r : rs)
            if (r.group == g) sub.push_back(r);
        CHECK(std::fabs(rep.groups[static_cast<size_t>(g)].pck30 - pck(sub, 30.0)) < 1e-9);
        CHECK(std::fabs(rep.groups[static_cast<size_t>(g)].ae - average_error(sub)) < 1e-9);
    }
}

TEST_CASE("perfect predictions give a zero-error all-100 report") {
    std::vector<FramePoses> truth(3);
    for (int i = 0; i < 3; ++i) {
        truth[static_cast<size_t>(i)].frame_id = i;
        truth[static_cast<size_t>(i)].persons = {skeleton_at(Vec3{0.1 * i, 0, 1.2}, 0.2)};
    }
    EvalReport rep = build_report(truth, truth);
    for (const GroupStats& g : rep.groups) {
        CHECK(g.rmse_x == doctest::Approx(0.0));
        CHECK(g.ae == doctest::Approx(0.0));
        CHECK(g.pck15 == doctest::Approx(100.0));
        CHECK(g.missed == 0);
    }
    CHECK(rep.overall.pck30 == doctest::Approx(100.0));
}

TEST_CASE("missing half the persons caps PCK at 50%") {
    std::vector<FramePoses> truth(4), pred(4);
    for (int i = 0; i < 4; ++i) {
        truth[static_cast<size_t>(i)].frame_id = i;
        truth[static_cast<size_t>(i)].persons = {skeleton_at(Vec3{-0.3, 0, 1.1}, 0.2),
                                                 skeleton_at(Vec3{0.4, 0, 1.4}, 0.2)};
        pred[static_cast<size_t>(i)].frame_id = i;
        pred[static_cast<size_t>(i)].persons = {skeleton_at(Vec3{-0.3, 0, 1.1}, 0.2)};
    }
    EvalReport rep = build_report(pred, truth);
    CHECK(rep.overall.pck30 == doctest::Approx(50.0));
    CHECK(rep.overall.missed == rep.overall.matched);
}

TEST_CASE("mirroring every scene leaves group statistics unchanged") {
    Pcg32 rng(23);
    std::vector<FramePoses> truth(6), pred(6);
    for (int i = 0; i < 6; ++i) {
        truth[static_cast<size_t>(i)].frame_id = i;
        pred[static_cast<size_t>(i)].frame_id = i;
        Skeleton3D t = skeleton_at(Vec3{rng.uniform(-0.3, 0.3), 0, 1.3}, 0.25);
        Skeleton3D p = t;
        for (int j = 0; j < kNumJoints; ++j) {
            p.joints[j].xyz = p.joints[j].xyz + Vec3{rng.uniform(-0.1, 0.1),
                                                     rng.uniform(-0.1, 0.1),
                                                     rng.uniform(-0.1, 0.1)};
            if (rng.next_below(8) == 0) p.joints[j].valid = false;
        }
        truth[static_cast<size_t>(i)].persons = {t};
        pred[static_cast<size_t>(i)].persons = {p};
    }
    EvalReport rep = build_report(pred, truth);

    auto mirror = [](const std::vector<FramePoses>& in) {
        std::vector<FramePoses> out = in;
        for (FramePoses& f : out) {
            for (Skeleton3D& s : f.persons) {
                Skeleton3D m = s;
                for (int j = 0; j < kNumJoints; ++j) {
                    m.joints[kMirrorJoint[j]] = s.joints[j];
                    m.joints[kMirrorJoint[j]].xyz.x = -s.joints[j].xyz.x;
                }
                s = m;
            }
        }
        return out;
    };
    EvalReport mrep = build_report(mirror(pred), mirror(truth));
    for (int g = 0; g < kNumJointGroups; ++g) {
        CHECK(mrep.groups[static_cast<size_t>(g)].rmse_x ==
              doctest::Approx(rep.groups[static_cast<size_t>(g)].rmse_x).epsilon(1e-9));
        CHECK(mrep.groups[static_cast<size_t>(g)].ae ==
              doctest::Approx(rep.groups[static_cast<size_t>(g)].ae).epsilon(1e-9));
        CHECK(mrep.groups[static_cast<size_t>(g)].pck15 ==
              doctest::Approx(rep.groups[static_cast<size_t>(g)].pck15).epsilon(1e-9));
    }
}

TEST_CASE("misaligned frame ids are rejected") {
    std::vector<FramePoses> truth(1), pred(1);
    truth[0].frame_id = 0;
    pred[0].frame_id = 5;
    CHECK_THROWS_AS(build_report(pred, truth), DomainError);
}

TEST_CASE("report renders all table columns") {
    std::vector<FramePoses> truth(2);
    truth[0].frame_id = 0;
    truth[1].frame_id = 1;
    truth[0].persons = {skeleton_at(Vec3{0, 0, 1.2}, 0.2)};
    truth[1].persons = {skeleton_at(Vec3{0.1, 0, 1.3}, 0.2)};
    EvalReport rep = build_report(truth, truth);
    std::string table = rep.to_table();
    for (const char* col : {"RMSE_x", "RMSE_y", "RMSE_z", "AE", "PCK-15", "PCK-20", "PCK-30"}) {
        CHECK(table.find(col) != std::string::npos);
    }
    for (std::string_view group : kJointGroupNames) {
        CHECK(table.find(group) != std::string::npos);
    }
    std::string jsonl = rep.to_jsonl();
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == kNumJointGroups + 1);
}
