// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "p2p/decode.hpp"
#include "p2p/skeleton.hpp"

namespace p2p {

// One evaluated truth joint. Matched joints carry per-axis errors in
// centimeters; missed joints only count against PCK.
struct JointErrorRecord {
    int group = 0;  // JointGroup index
    bool matched = false;
    double ex_cm = 0.0, ey_cm = 0.0, ez_cm = 0.0;
    double euclidean_cm = 0.0;
    int64_t frame_id = 0;
};

struct GroupStats {
    std::string name;
    double rmse_x = 0.0, rmse_y = 0.0, rmse_z = 0.0;
    double ae = 0.0;
    double pck15 = 0.0, pck20 = 0.0, pck30 = 0.0;
    int64_t matched = 0;
    int64_t missed = 0;
};

struct EvalReport {
    std::array<GroupStats, kNumJointGroups> groups;
    GroupStats overall;  // pooled over all reported groups

    std::string to_table() const;
    std::string to_jsonl() const;
};

// Eq.-style statistics over records. Empty input raises DomainError; missed
// records are excluded from RMSE/AE and counted as PCK failures.
double rmse_axis(const std::vector<JointErrorRecord>& records, int axis);
double average_error(const std::vector<JointErrorRecord>& records);
double pck(const std::vector<JointErrorRecord>& records, double tau_cm);

// Per-frame matching (neck distance, exhaustive) followed by pooled
// statistics. Only visible truth joints enter the evaluation; whether a
// truth joint is visible comes with the truth skeletons (invalid joints are
// skipped entirely).
struct FramePoses {
    int64_t frame_id = 0;
    std::vector<Skeleton3D> persons;
};

std::vector<JointErrorRecord> joint_error_records(const std::vector<FramePoses>& predicted,
                                                  const std::vector<FramePoses>& truth);

EvalReport build_report(const std::vector<FramePoses>& predicted,
                        const std::vector<FramePoses>& truth);

EvalReport report_from_records(const std::vector<JointErrorRecord>& records);

}  // namespace p2p
