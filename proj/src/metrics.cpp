// SPDX-License-Identifier: Apache-2.0
#include "p2p/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "p2p/common.hpp"

namespace p2p {

double rmse_axis(const std::vector<JointErrorRecord>& records, int axis) {
    require(axis >= 0 && axis < 3, "rmse_axis: axis must be 0..2");
    double sum = 0.0;
    int64_t n = 0;
    for (const JointErrorRecord& r : records) {
        if (!r.matched) continue;
        const double e = axis == 0 ? r.ex_cm : axis == 1 ? r.ey_cm : r.ez_cm;
        sum += e * e;
        ++n;
    }
    if (n == 0) throw DomainError("rmse_axis: no matched records, statistic undefined");
    return std::sqrt(sum / static_cast<double>(n));
}

double average_error(const std::vector<JointErrorRecord>& records) {
    double sum = 0.0;
    int64_t n = 0;
    for (const JointErrorRecord& r : records) {
        if (!r.matched) continue;
        sum += std::sqrt(r.ex_cm * r.ex_cm + r.ey_cm * r.ey_cm + r.ez_cm * r.ez_cm);
        ++n;
    }
    if (n == 0) throw DomainError("average_error: no matched records, statistic undefined");
    return sum / static_cast<double>(n);
}

double pck(const std::vector<JointErrorRecord>& records, double tau_cm) {
    require(tau_cm > 0.0, "pck: threshold must be positive");
    if (records.empty()) throw DomainError("pck: no records, statistic undefined");
    int64_t hit = 0;
    for (const JointErrorRecord& r : records) {
        // "below tau" is strict; missed joints count as failures.
        if (r.matched && r.euclidean_cm < tau_cm) ++hit;
    }
    return 100.0 * static_cast<double>(hit) / static_cast<double>(records.size());
}

std::vector<JointErrorRecord> joint_error_records(const std::vector<FramePoses>& predicted,
                                                  const std::vector<FramePoses>& truth) {
    require(predicted.size() == truth.size(), "evaluation: frame count mismatch");
    std::vector<JointErrorRecord> records;
    for (size_t fi = 0; fi < truth.size(); ++fi) {
        require(predicted[fi].frame_id == truth[fi].frame_id,
                "evaluation: frame ids are not aligned at index " + std::to_string(fi));
        const std::vector<int> assign =
            match_to_ground_truth(predicted[fi].persons, truth[fi].persons);
        for (size_t ti = 0; ti < truth[fi].persons.size(); ++ti) {
            const Skeleton3D& t = truth[fi].persons[ti];
            const int pi = assign[ti];
            for (int j = 0; j < kNumJoints; ++j) {
                const int group = joint_group_of(j);
                if (group < 0) continue;       // head is tracked but not reported
                if (!t.joints[j].valid) continue;  // occluded truth joints are excluded
                JointErrorRecord rec;
                rec.group = group;
                rec.frame_id = truth[fi].frame_id;
                if (pi >= 0 && predicted[fi].persons[static_cast<size_t>(pi)].joints[j].valid) {
                    const Vec3 d =
                        predicted[fi].persons[static_cast<size_t>(pi)].joints[j].xyz - t.joints[j].xyz;
                    rec.matched = true;
                    rec.ex_cm = d.x * 100.0;
                    rec.ey_cm = d.y * 100.0;
                    rec.ez_cm = d.z * 100.0;
                    rec.euclidean_cm = d.norm() * 100.0;
                }
                records.push_back(rec);
            }
        }
    }
    return records;
}

namespace {

GroupStats stats_for(const std::string& name, const std::vector<JointErrorRecord>& records) {
    GroupStats g;
    g.name = name;
    for (const JointErrorRecord& r : records) {
        if (r.matched)
            ++g.matched;
        else
            ++g.missed;
    }
    if (g.matched > 0) {
        g.rmse_x = rmse_axis(records, 0);
        g.rmse_y = rmse_axis(records, 1);
        g.rmse_z = rmse_axis(records, 2);
        g.ae = average_error(records);
    }
    if (!records.empty()) {
        g.pck15 = pck(records, 15.0);
        g.pck20 = pck(records, 20.0);
        g.pck30 = pck(records, 30.0);
    }
    return g;
}

}  // namespace

EvalReport report_from_records(const std::vector<JointErrorRecord>& records) {
    EvalReport rep;
    for (int gi = 0; gi < kNumJointGroups; ++gi) {
        std::vector<JointErrorRecord> sub;
        for (const JointErrorRecord& r : records) {
            if (r.group == gi) sub.push_back(r);
        }
        rep.groups[static_cast<size_t>(gi)] =
            stats_for(std::string(kJointGroupNames[static_cast<size_t>(gi)]), sub);
    }
    rep.overall = stats_for("all", records);
    return rep;
}

EvalReport build_report(const std::vector<FramePoses>& predicted,
                        const std::vector<FramePoses>& truth) {
    return report_from_records(joint_error_records(predicted, truth));
}

std::string EvalReport::to_table() const {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %8s %9s %9s %9s %8s %7s\n", "",
                  "RMSE_x", "RMSE_y", "RMSE_z", "AE", "PCK-15", "PCK-20", "PCK-30", "matched",
                  "missed");
    os << line;
    auto row = [&](const GroupStats& g) {
        std::snprintf(line, sizeof(line),
                      "%-10s %8.1fcm %8.1fcm %8.1fcm %6.1fcm %8.1f%% %8.1f%% %8.1f%% %8lld %7lld\n",
                      g.name.c_str(), g.rmse_x, g.rmse_y, g.rmse_z, g.ae, g.pck15, g.pck20,
                      g.pck30, static_cast<long long>(g.matched),
                      static_cast<long long>(g.missed));
        os << line;
    };
    for (const GroupStats& g : groups) row(g);
    row(overall);
    return os.str();
}

std::string EvalReport::to_jsonl() const {
    std::ostringstream os;
    auto row = [&](const GroupStats& g) {
        char line[512];
        std::snprintf(line, sizeof(line),
                      "{\"group\":\"%s\",\"rmse_x_cm\":%.9g,\"rmse_y_cm\":%.9g,"
                      "\"rmse_z_cm\":%.9g,\"ae_cm\":%.9g,\"pck15\":%.9g,\"pck20\":%.9g,"
                      "\"pck30\":%.9g,\"matched\":%lld,\"missed\":%lld}\n",
                      g.name.c_str(), g.rmse_x, g.rmse_y, g.rmse_z, g.ae, g.pck15, g.pck20,
                      g.pck30, static_cast<long long>(g.matched),
                      static_cast<long long>(g.missed));
        os << line;
    };
    for (const GroupStats& g : groups) row(g);
    row(overall);
    return os.str();
}

}  // namespace p2p
