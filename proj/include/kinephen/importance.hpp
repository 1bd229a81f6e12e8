#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/decide.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/features.hpp"
#include "kinephen/pipeline.hpp"

namespace kinephen {

struct ImportanceRecord {
    std::string model;
    int fold = 0;
    Phenotype label = Phenotype::Dystonia;
    int feature = 0;  // raw column index
    double base_error = 0;
    double delta_mean = 0;
    double delta_std = 0;
    int n_repeats = 5;
};

// Held-out windows of one fold, restricted to rows usable for one label.
struct LabelTestSet {
    const Matrix* x_raw = nullptr;  // n x 374, unscaled
    std::vector<std::string> subjects;
    std::vector<std::uint8_t> y;      // window truth for the label
    std::vector<std::uint8_t> valid;  // masked windows are skipped
};

namespace detail {

struct SubjectRows {
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> rows;
    std::map<std::string, std::uint8_t> truth;
};

inline SubjectRows group_valid_rows(const LabelTestSet& set) {
    SubjectRows g;
    for (std::size_t i = 0; i < set.subjects.size(); ++i) {
        if (!set.valid[i]) continue;
        auto& rows = g.rows[set.subjects[i]];
        if (rows.empty()) g.order.push_back(set.subjects[i]);
        rows.push_back(static_cast<int>(i));
        auto& t = g.truth[set.subjects[i]];
        t = t || set.y[i];
    }
    return g;
}

// Patient error (FP+FN)/N through the frozen inference path.
inline double patient_error(const SubjectRows& g, const std::vector<double>& window_probs,
                            const std::vector<int>& prob_of_row, double tau,
                            const PoolingSpec& pooling) {
    double errors = 0;
    std::vector<double> probs;
    for (const auto& subject : g.order) {
        probs.clear();
        for (int r : g.rows.at(subject)) probs.push_back(window_probs[prob_of_row[r]]);
        const bool call = pool(probs, pooling) >= tau;
        if (call != (g.truth.at(subject) != 0)) errors += 1.0;
    }
    return errors / static_cast<double>(g.order.size());
}

}  // namespace detail

// Decision-level permutation importance: permute one raw feature column
// across the held-out windows, re-run the frozen pipeline -> pooling ->
// threshold chain, and record the change in patient-level error. Candidates
// are the selector's chosen columns (all columns when no selector ran),
// capped at the first `max_features`. Permutations are seeded per
// (feature, repeat) so results are independent of evaluation order.
inline std::vector<ImportanceRecord> permutation_importance(
    const FittedPipeline& pipeline, const LabelTestSet& set, Phenotype label, double tau,
    const PoolingSpec& pooling, int repeats, int max_features, std::uint64_t seed, int fold) {
    std::vector<ImportanceRecord> out;
    const auto groups = detail::group_valid_rows(set);
    if (groups.order.empty()) return out;

    std::vector<int> rows;  // valid row indices
    for (const auto& s : groups.order)
        for (int r : groups.rows.at(s)) rows.push_back(r);
    std::sort(rows.begin(), rows.end());
    std::vector<int> prob_of_row(set.subjects.size(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) prob_of_row[rows[i]] = static_cast<int>(i);

    std::vector<double> base_probs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        base_probs[i] = pipeline.probability(set.x_raw->row(rows[i]));
    const double base_error = detail::patient_error(groups, base_probs, prob_of_row, tau, pooling);

    std::vector<int> candidates = pipeline.selected;
    if (candidates.empty()) {
        candidates.resize(set.x_raw->cols);
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    if (static_cast<int>(candidates.size()) > max_features) candidates.resize(max_features);

    std::vector<double> probs(rows.size());
    std::vector<double> row_buf(set.x_raw->cols);
    std::vector<int> perm(rows.size());
    for (int feature : candidates) {
        ImportanceRecord rec;
        rec.model = pipeline.spec.name();
        rec.fold = fold;
        rec.label = label;
        rec.feature = feature;
        rec.base_error = base_error;
        rec.n_repeats = repeats;
        std::vector<double> deltas(repeats, 0.0);
        for (int r = 0; r < repeats; ++r) {
            auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(feature),
                                         static_cast<std::uint64_t>(r)));
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto src = set.x_raw->row(rows[i]);
                std::copy(src.begin(), src.end(), row_buf.begin());
                row_buf[feature] = set.x_raw->at(rows[perm[i]], feature);
                probs[i] = pipeline.probability(row_buf);
            }
            deltas[r] =
                detail::patient_error(groups, probs, prob_of_row, tau, pooling) - base_error;
        }
        rec.delta_mean = vec_mean(deltas);
        rec.delta_std = std::sqrt(vec_var(deltas, rec.delta_mean));
        out.push_back(std::move(rec));
    }
    return out;
}

enum class RollupGroup : int { Family = 0, Region };

inline int rollup_group_of(int feature, RollupGroup g) {
    if (g == RollupGroup::Family) return static_cast<int>(metric_family(feature_metric(feature)));
    return static_cast<int>(landmark_region(feature_landmark(feature)));
}

inline int rollup_group_count(RollupGroup g) { return g == RollupGroup::Family ? kNumFamilies : 3; }

inline std::string rollup_group_name(int idx, RollupGroup g) {
    return std::string(g == RollupGroup::Family ? family_name(static_cast<Family>(idx))
                                                : region_name(static_cast<Region>(idx)));
}

// Normalized positive-importance shares per label. Features qualify when
// their mean delta is positive in at least `stability_min_folds` folds; the
// kept positive mass is summed by group and normalized within the label.
// Labels with no positive mass are omitted.
inline std::map<Phenotype, std::vector<double>> rollup_importance(
    const std::vector<ImportanceRecord>& records, RollupGroup group_by,
    int stability_min_folds = 2) {
    std::map<Phenotype, std::map<int, std::vector<double>>> per_label_feature;  // deltas by fold
    for (const auto& r : records) per_label_feature[r.label][r.feature].push_back(r.delta_mean);

    std::map<Phenotype, std::vector<double>> shares;
    const int n_groups = rollup_group_count(group_by);
    for (const auto& [label, features] : per_label_feature) {
        std::vector<double> mass(n_groups, 0.0);
        double total = 0;
        for (const auto& [feature, deltas] : features) {
            int positive_folds = 0;
            for (double d : deltas)
                if (d > 0) ++positive_folds;
            if (positive_folds < stability_min_folds) continue;
            double pos_sum = 0;
            for (double d : deltas) pos_sum += std::max(0.0, d);
            mass[rollup_group_of(feature, group_by)] += pos_sum;
            total += pos_sum;
        }
        if (total <= 0) continue;
        for (auto& v : mass) v /= total;
        shares[label] = std::move(mass);
    }
    return shares;
}

// Per-fold variant (no stability filter); used to check that a family
// dominates consistently across folds.
inline std::map<Phenotype, std::vector<double>> fold_rollup(
    const std::vector<ImportanceRecord>& records, RollupGroup group_by, int fold) {
    std::map<Phenotype, std::vector<double>> shares;
    const int n_groups = rollup_group_count(group_by);
    std::map<Phenotype, std::vector<double>> mass;
    std::map<Phenotype, double> total;
    for (const auto& r : records) {
        if (r.fold != fold || r.delta_mean <= 0) continue;
        auto& m = mass[r.label];
        if (m.empty()) m.assign(n_groups, 0.0);
        m[rollup_group_of(r.feature, group_by)] += r.delta_mean;
        total[r.label] += r.delta_mean;
    }
    for (auto& [label, m] : mass) {
        if (total[label] <= 0) continue;
        for (auto& v : m) v /= total[label];
        shares[label] = std::move(m);
    }
    return shares;
}

}  // namespace kinephen
