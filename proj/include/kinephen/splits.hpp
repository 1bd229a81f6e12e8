#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

// Subject-level fold assignment; windows inherit their subject's fold, so one
// subject can never straddle a train/test boundary.
struct FoldPlan {
    int k = 5;
    std::uint64_t seed = 42;
    std::map<std::string, int> assignments;

    int fold_of(const std::string& subject) const {
        const auto it = assignments.find(subject);
        if (it == assignments.end()) throw InternalError("subject missing from fold plan: " + subject);
        return it->second;
    }
};

namespace detail {

// Deterministic subject processing order: sort ids, then a seeded shuffle so
// input row order never matters.
inline std::vector<std::string> seeded_subject_order(std::vector<std::string> subjects,
                                                     std::uint64_t seed) {
    std::sort(subjects.begin(), subjects.end());
    auto rng = make_rng(mix_seed(seed, 0x5b71));
    std::shuffle(subjects.begin(), subjects.end(), rng);
    return subjects;
}

}  // namespace detail

// Greedy grouped stratification for binary tasks: subjects (heaviest first)
// go to the fold that keeps per-fold positive window rates closest to the
// global rate, under balanced per-fold subject quotas.
inline FoldPlan stratified_group_kfold(const std::vector<std::pair<std::string, int>>& rows, int k,
                                       std::uint64_t seed) {
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;

    struct Tally {
        long windows = 0;
        long positives = 0;
    };
    std::map<std::string, Tally> per_subject;
    long total_windows = 0, total_pos = 0;
    for (const auto& [subject, y] : rows) {
        auto& t = per_subject[subject];
        ++t.windows;
        t.positives += y ? 1 : 0;
        ++total_windows;
        total_pos += y ? 1 : 0;
    }
    const auto n_subjects = static_cast<int>(per_subject.size());
    if (n_subjects < k)
        throw TooFewSubjects("need at least " + std::to_string(k) + " subjects, have " +
                             std::to_string(n_subjects));
    if (total_pos == 0 || total_pos == total_windows)
        throw DegenerateDataset("stratified_group_kfold requires both classes");

    std::vector<std::string> names;
    names.reserve(per_subject.size());
    for (const auto& [s, t] : per_subject) names.push_back(s);
    auto order = detail::seeded_subject_order(names, seed);
    std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        return per_subject[a].windows > per_subject[b].windows;
    });

    const double global_rate = static_cast<double>(total_pos) / static_cast<double>(total_windows);
    std::vector<int> capacity(k, n_subjects / k);
    for (int f = 0; f < n_subjects % k; ++f) ++capacity[f];
    std::vector<long> fold_windows(k, 0), fold_pos(k, 0);

    for (const auto& subject : order) {
        const auto& t = per_subject[subject];
        int best = -1;
        double best_dev = 0;
        long best_windows = 0;
        for (int f = 0; f < k; ++f) {
            if (capacity[f] == 0) continue;
            double dev = 0;
            for (int g = 0; g < k; ++g) {
                const long w = fold_windows[g] + (g == f ? t.windows : 0);
                const long p = fold_pos[g] + (g == f ? t.positives : 0);
                const double rate = w > 0 ? static_cast<double>(p) / static_cast<double>(w) : 0.0;
                dev += std::abs(rate - global_rate);
            }
            if (best < 0 || dev < best_dev - 1e-12 ||
                (std::abs(dev - best_dev) <= 1e-12 && fold_windows[f] < best_windows)) {
                best = f;
                best_dev = dev;
                best_windows = fold_windows[f];
            }
        }
        plan.assignments[subject] = best;
        fold_windows[best] += t.windows;
        fold_pos[best] += t.positives;
        --capacity[best];
    }
    return plan;
}

// Iterative multi-label stratification on subject-level OR vectors: the
// rarest label with unassigned positives is placed first, each subject going
// to the fold with the greatest remaining demand for that label.
inline FoldPlan multilabel_stratified_kfold(const std::map<std::string, LabelVec>& subject_or_labels,
                                            int k, std::uint64_t seed) {
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    const auto n = static_cast<int>(subject_or_labels.size());
    if (n < k)
        throw TooFewSubjects("need at least " + std::to_string(k) + " subjects, have " +
                             std::to_string(n));

    std::vector<std::string> names;
    for (const auto& [s, v] : subject_or_labels) names.push_back(s);
    const auto order = detail::seeded_subject_order(names, seed);

    std::vector<int> fold_priority(k);
    std::iota(fold_priority.begin(), fold_priority.end(), 0);
    {
        auto rng = make_rng(mix_seed(seed, 0xf01d));
        std::shuffle(fold_priority.begin(), fold_priority.end(), rng);
    }

    std::array<double, kNumPhenotypes> label_total{};
    for (const auto& [s, v] : subject_or_labels)
        for (int l = 0; l < kNumPhenotypes; ++l) label_total[l] += v[l];

    std::vector<std::array<double, kNumPhenotypes>> demand(
        k, [&] {
            std::array<double, kNumPhenotypes> d{};
            for (int l = 0; l < kNumPhenotypes; ++l) d[l] = label_total[l] / k;
            return d;
        }());
    std::vector<double> capacity(k, static_cast<double>(n) / k);
    std::map<std::string, bool> assigned;

    auto place = [&](const std::string& subject, int fold) {
        plan.assignments[subject] = fold;
        assigned[subject] = true;
        capacity[fold] -= 1.0;
        const auto& bits = subject_or_labels.at(subject);
        for (int l = 0; l < kNumPhenotypes; ++l)
            if (bits[l]) demand[fold][l] -= 1.0;
    };

    while (true) {
        // rarest label among those with unassigned positive subjects
        int label = -1;
        long rarest = 0;
        for (int l = 0; l < kNumPhenotypes; ++l) {
            long remaining = 0;
            for (const auto& [s, v] : subject_or_labels)
                if (!assigned[s] && v[l]) ++remaining;
            if (remaining > 0 && (label < 0 || remaining < rarest)) {
                label = l;
                rarest = remaining;
            }
        }
        if (label < 0) break;
        for (const auto& subject : order) {
            if (assigned[subject] || !subject_or_labels.at(subject)[label]) continue;
            int best = -1;
            for (int idx = 0; idx < k; ++idx) {
                const int f = fold_priority[idx];
                if (best < 0 || demand[f][label] > demand[best][label] + 1e-12 ||
                    (std::abs(demand[f][label] - demand[best][label]) <= 1e-12 &&
                     capacity[f] > capacity[best] + 1e-12)) {
                    best = f;
                }
            }
            place(subject, best);
        }
    }
    for (const auto& subject : order) {
        if (assigned[subject]) continue;
        int best = -1;
        for (int idx = 0; idx < k; ++idx) {
            const int f = fold_priority[idx];
            if (best < 0 || capacity[f] > capacity[best] + 1e-12) best = f;
        }
        place(subject, best);
    }
    return plan;
}

// Random undersampling of the majority class down to the minority size,
// applied only when the relative imbalance exceeds 20%. Returns the kept row
// positions in ascending order; minority rows are never dropped.
inline std::vector<int> undersample_majority(const std::vector<std::uint8_t>& y, std::uint64_t seed) {
    std::vector<int> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(static_cast<int>(i));
    const auto n0 = static_cast<double>(neg.size());
    const auto n1 = static_cast<double>(pos.size());
    std::vector<int> kept;
    if (n0 == 0 || n1 == 0 || std::abs(n0 - n1) / std::max(n0, n1) <= 0.2) {
        kept.resize(y.size());
        std::iota(kept.begin(), kept.end(), 0);
        return kept;
    }
    auto& majority = n0 > n1 ? neg : pos;
    auto& minority = n0 > n1 ? pos : neg;
    auto rng = make_rng(mix_seed(seed, 0xba1a));
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(minority.size());
    kept = minority;
    kept.insert(kept.end(), majority.begin(), majority.end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

// Window-level train/test index sets induced by a subject-level plan.
struct FoldIndices {
    std::vector<int> train;
    std::vector<int> test;
};

inline FoldIndices expand_fold(const FoldPlan& plan, const std::vector<std::string>& row_subjects,
                               int fold) {
    FoldIndices out;
    for (std::size_t i = 0; i < row_subjects.size(); ++i) {
        if (plan.fold_of(row_subjects[i]) == fold)
            out.test.push_back(static_cast<int>(i));
        else
            out.train.push_back(static_cast<int>(i));
    }
    return out;
}

}  // namespace kinephen
