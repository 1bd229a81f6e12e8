#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "kinephen/errors.hpp"

namespace kinephen {

// The 17 COCO pose keypoints, in the canonical COCO order. This order is
// also the column order of every ingest CSV and feature matrix.
enum class Landmark : int {
    Nose = 0,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
};

inline constexpr int kNumLandmarks = 17;

enum class Region : int { Cranial = 0, UpperLimb, LowerLimb };

inline constexpr std::array<std::string_view, kNumLandmarks> kLandmarkNames = {
    "nose",          "left_eye",      "right_eye",  "left_ear",
    "right_ear",     "left_shoulder", "right_shoulder",
    "left_elbow",    "right_elbow",   "left_wrist", "right_wrist",
    "left_hip",      "right_hip",     "left_knee",  "right_knee",
    "left_ankle",    "right_ankle",
};

inline std::string_view landmark_name(Landmark lm) {
    return kLandmarkNames[static_cast<int>(lm)];
}

inline Region landmark_region(Landmark lm) {
    const int i = static_cast<int>(lm);
    if (i <= static_cast<int>(Landmark::RightEar)) return Region::Cranial;
    if (i <= static_cast<int>(Landmark::RightWrist)) return Region::UpperLimb;
    return Region::LowerLimb;
}

inline constexpr std::array<std::string_view, 3> kRegionNames = {
    "cranial", "upper_limb", "lower_limb"};

inline std::string_view region_name(Region r) {
    return kRegionNames[static_cast<int>(r)];
}

// The eight phenotype labels. The enum order fixes the bit order of every
// serialized label vector.
enum class Phenotype : int {
    Dystonia = 0,
    Tremor,
    Myoclonus,
    Chorea,
    Athetosis,
    Ballismus,
    Stereotypies,
    Tics,
};

inline constexpr int kNumPhenotypes = 8;

inline constexpr std::array<std::string_view, kNumPhenotypes> kPhenotypeNames = {
    "dystonia",  "tremor",    "myoclonus",    "chorea",
    "athetosis", "ballismus", "stereotypies", "tics",
};

inline std::string_view phenotype_name(Phenotype p) {
    return kPhenotypeNames[static_cast<int>(p)];
}

inline Phenotype parse_phenotype(std::string_view s) {
    for (int i = 0; i < kNumPhenotypes; ++i)
        if (kPhenotypeNames[i] == s) return static_cast<Phenotype>(i);
    throw InputError("unknown phenotype: " + std::string(s));
}

enum class Condition : int { Rest = 0, Posture, Action, Unspecified };

inline constexpr std::array<std::string_view, 4> kConditionNames = {
    "rest", "posture", "action", "unspecified"};

inline std::string_view condition_name(Condition c) {
    return kConditionNames[static_cast<int>(c)];
}

inline Condition parse_condition(std::string_view s) {
    std::string lower(s);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower.empty() || lower == "unspecified") return Condition::Unspecified;
    for (int i = 0; i < 3; ++i)
        if (kConditionNames[i] == lower) return static_cast<Condition>(i);
    throw InputError("unknown condition: " + std::string(s));
}

// Per-window, per-label vectors. Annotation values live in {0,1,2}.
using LabelVec = std::array<std::uint8_t, kNumPhenotypes>;

}  // namespace kinephen
