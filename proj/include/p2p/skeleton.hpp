// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace p2p {

// 14-joint body model: the seven reported joint groups expanded to
// left/right, plus head and neck. The head anchors the head-neck limb that
// stabilizes skeleton assembly.
enum Joint : int {
    kHead = 0,
    kNeck,
    kLShoulder,
    kRShoulder,
    kLElbow,
    kRElbow,
    kLWrist,
    kRWrist,
    kLHip,
    kRHip,
    kLKnee,
    kRKnee,
    kLAnkle,
    kRAnkle,
};

constexpr int kNumJoints = 14;
constexpr int kNumLimbs = 13;
constexpr int kNumPafChannels = 2 * kNumLimbs;

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "head",    "neck",    "l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_wrist",
    "r_wrist", "l_hip",   "r_hip",      "l_knee",     "r_knee",  "l_ankle", "r_ankle"};

// Limb l connects kLimbPairs[l].first -> .second and owns PAF channels
// (2l, 2l+1). The order also drives greedy assembly.
struct LimbPair {
    int parent;
    int child;
};

constexpr std::array<LimbPair, kNumLimbs> kLimbPairs = {{
    {kNeck, kHead},        // 0
    {kNeck, kLShoulder},   // 1
    {kNeck, kRShoulder},   // 2
    {kLShoulder, kLElbow},
    {kRShoulder, kRElbow},
    {kLElbow, kLWrist},
    {kRElbow, kRWrist},
    {kNeck, kLHip},
    {kNeck, kRHip},
    {kLHip, kLKnee},
    {kRHip, kRKnee},
    {kLKnee, kLAnkle},
    {kRKnee, kRAnkle},
}};

// Table-style reporting groups; head is tracked but not reported.
enum class JointGroup : int {
    kNeckGroup = 0,
    kShoulders,
    kHips,
    kKnees,
    kAnkles,
    kElbows,
    kWrists,
};

constexpr int kNumJointGroups = 7;

constexpr std::array<std::string_view, kNumJointGroups> kJointGroupNames = {
    "neck", "shoulders", "hips", "knees", "ankles", "elbows", "wrists"};

// Returns -1 for joints outside the reported taxonomy (the head).
constexpr int joint_group_of(int joint) {
    switch (joint) {
        case kNeck: return 0;
        case kLShoulder:
        case kRShoulder: return 1;
        case kLHip:
        case kRHip: return 2;
        case kLKnee:
        case kRKnee: return 3;
        case kLAnkle:
        case kRAnkle: return 4;
        case kLElbow:
        case kRElbow: return 5;
        case kLWrist:
        case kRWrist: return 6;
        default: return -1;
    }
}

// Left-right mirror of each joint (head/neck map to themselves).
constexpr std::array<int, kNumJoints> kMirrorJoint = {
    kHead,   kNeck,   kRShoulder, kLShoulder, kRElbow, kLElbow, kRWrist,
    kLWrist, kRHip,   kLHip,      kRKnee,     kLKnee,  kRAnkle, kLAnkle};

}  // namespace p2p
