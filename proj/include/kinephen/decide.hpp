#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

// Majority vote over window predictions; exact half counts as positive.
inline int majority_vote(std::span<const std::uint8_t> window_preds) {
    if (window_preds.empty()) throw InputError("majority_vote on empty prediction list");
    double acc = 0;
    for (auto v : window_preds) acc += v ? 1.0 : 0.0;
    return acc / static_cast<double>(window_preds.size()) >= 0.5 ? 1 : 0;
}

enum class PoolingKind : int { Percentile = 0, Max, TopKMean, NoisyOr };

struct PoolingSpec {
    PoolingKind kind = PoolingKind::Percentile;
    double q = 0.90;  // percentile
    int k = 3;        // top-k mean

    std::string name() const {
        switch (kind) {
            case PoolingKind::Percentile: return "p" + std::to_string(static_cast<int>(q * 100));
            case PoolingKind::Max: return "max";
            case PoolingKind::TopKMean: return "top" + std::to_string(k);
            case PoolingKind::NoisyOr: return "noisy_or";
        }
        return "?";
    }
};

// Window probabilities -> one subject-level probability.
inline double pool(std::span<const double> probs, const PoolingSpec& spec) {
    if (probs.empty()) throw InputError("pool on empty probability list");
    switch (spec.kind) {
        case PoolingKind::Percentile:
            return quantile(probs, spec.q);
        case PoolingKind::Max:
            return *std::max_element(probs.begin(), probs.end());
        case PoolingKind::TopKMean: {
            std::vector<double> sorted(probs.begin(), probs.end());
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, spec.k)),
                                                 sorted.size());
            double acc = 0;
            for (std::size_t i = 0; i < k; ++i) acc += sorted[i];
            return acc / static_cast<double>(k);
        }
        case PoolingKind::NoisyOr: {
            double prod = 1.0;
            for (double p : probs) prod *= 1.0 - p;
            return 1.0 - prod;
        }
    }
    throw InternalError("unknown pooling kind");
}

// The 199-point threshold grid spanning [0.01, 0.99].
inline const std::vector<double>& threshold_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g(199);
        for (int i = 0; i < 199; ++i) g[i] = 0.01 + (0.99 - 0.01) * i / 198.0;
        return g;
    }();
    return grid;
}

struct ThresholdConstraints {
    std::optional<int> max_control_fp;
    std::optional<double> max_control_fpr;
    std::optional<double> min_specificity;
};

struct ThresholdPolicy {
    double alpha = 0.5;  // cost = (1-alpha) FPR + alpha FNR
    ThresholdConstraints constraints;
    std::array<std::optional<double>, kNumPhenotypes> alpha_per_label;
    std::array<std::optional<ThresholdConstraints>, kNumPhenotypes> constraints_per_label;

    double alpha_for(Phenotype ph) const {
        const auto& o = alpha_per_label[static_cast<int>(ph)];
        return o ? *o : alpha;
    }
    const ThresholdConstraints& constraints_for(Phenotype ph) const {
        const auto& o = constraints_per_label[static_cast<int>(ph)];
        return o ? *o : constraints;
    }
};

struct TrainingPoint {
    double pooled = 0;      // subject-level probability
    bool truth = false;     // subject-level label
    bool is_control = false;
};

struct TunedThreshold {
    double tau = 1.0;
    bool feasible = false;       // some grid point satisfied the constraints
    bool degenerate = false;     // a class was missing; tau pinned to 1.0
    double cost = 0.0;           // cost at tau, when feasible
};

// Minimizes (1-alpha) FPR + alpha FNR over the grid, dropping points that
// violate the control-aware constraints; ties resolve toward the largest
// (most conservative) threshold. Evaluated on training subjects only.
inline TunedThreshold tune_threshold(std::span<const TrainingPoint> train, double alpha,
                                     const ThresholdConstraints& constraints) {
    TunedThreshold out;
    double n_pos = 0, n_neg = 0, n_ctrl = 0;
    for (const auto& s : train) {
        (s.truth ? n_pos : n_neg) += 1.0;
        n_ctrl += s.is_control ? 1.0 : 0.0;
    }
    if (n_pos == 0 || n_neg == 0) {
        out.degenerate = true;
        return out;  // tau = 1.0, never call positive
    }
    for (double t : threshold_grid()) {
        double fp = 0, fn = 0, ctrl_fp = 0;
        for (const auto& s : train) {
            const bool call = s.pooled >= t;
            if (call && !s.truth) {
                fp += 1.0;
                if (s.is_control) ctrl_fp += 1.0;
            }
            if (!call && s.truth) fn += 1.0;
        }
        if (constraints.max_control_fp && ctrl_fp > *constraints.max_control_fp) continue;
        if (constraints.max_control_fpr && n_ctrl > 0 &&
            ctrl_fp / n_ctrl > *constraints.max_control_fpr + 1e-12)
            continue;
        if (constraints.min_specificity && 1.0 - fp / n_neg < *constraints.min_specificity - 1e-12)
            continue;
        const double cost = (1.0 - alpha) * (fp / n_neg) + alpha * (fn / n_pos);
        if (!out.feasible || cost < out.cost - 1e-12 ||
            (std::abs(cost - out.cost) <= 1e-12 && t > out.tau)) {
            out.feasible = true;
            out.cost = cost;
            out.tau = t;
        }
    }
    if (!out.feasible) out.tau = 1.0;  // NoFeasibleThreshold: never call positive
    return out;
}

enum class ConfusionRole : int { TP = 0, TN, FP, FN };

inline std::string_view role_name(ConfusionRole r) {
    switch (r) {
        case ConfusionRole::TP: return "TP";
        case ConfusionRole::TN: return "TN";
        case ConfusionRole::FP: return "FP";
        case ConfusionRole::FN: return "FN";
    }
    return "?";
}

inline ConfusionRole confusion_role(bool call, bool truth) {
    if (call && truth) return ConfusionRole::TP;
    if (!call && !truth) return ConfusionRole::TN;
    if (call) return ConfusionRole::FP;
    return ConfusionRole::FN;
}

// Pooled probabilities, thresholds, calls, truth and confusion roles for one
// subject across the eight labels.
struct PatientProfile {
    std::string subject_id;
    bool is_control = false;
    std::array<double, kNumPhenotypes> pooled{};
    std::array<double, kNumPhenotypes> thresholds{};
    std::array<std::uint8_t, kNumPhenotypes> calls{};
    std::array<std::uint8_t, kNumPhenotypes> truth{};
    std::array<ConfusionRole, kNumPhenotypes> roles{};
    std::array<std::uint8_t, kNumPhenotypes> label_active{};
};

// One label's window-level inference over a set of held-out windows.
struct LabelInference {
    std::vector<double> window_probs;
    std::vector<std::string> subjects;      // per window
    std::vector<std::uint8_t> window_truth;  // per window
    std::vector<std::uint8_t> valid;         // masked windows are skipped
    double tau = 1.0;
};

// Assembles per-subject profiles from per-label window probabilities: pool
// within subject, threshold with the pre-tuned tau, derive truth as the OR of
// the subject's valid window labels. Thresholds must come from disjoint
// training subjects.
inline std::vector<PatientProfile> infer_profiles(
    const std::array<std::optional<LabelInference>, kNumPhenotypes>& per_label,
    const PoolingSpec& pooling, const std::map<std::string, bool>& is_control) {
    std::map<std::string, PatientProfile> by_subject;
    for (int l = 0; l < kNumPhenotypes; ++l) {
        if (!per_label[l]) continue;
        const auto& inf = *per_label[l];
        std::map<std::string, std::vector<double>> probs;
        std::map<std::string, bool> truth;
        std::vector<std::string> order;
        for (std::size_t i = 0; i < inf.subjects.size(); ++i) {
            if (!inf.valid.empty() && !inf.valid[i]) continue;
            auto& v = probs[inf.subjects[i]];
            if (v.empty()) order.push_back(inf.subjects[i]);
            v.push_back(inf.window_probs[i]);
            auto& t = truth[inf.subjects[i]];
            t = t || inf.window_truth[i];
        }
        for (const auto& subject : order) {
            auto& profile = by_subject[subject];
            profile.subject_id = subject;
            const auto it = is_control.find(subject);
            profile.is_control = it != is_control.end() && it->second;
            const double pooled = pool(probs[subject], pooling);
            const bool call = pooled >= inf.tau;
            const bool t = truth[subject];
            profile.pooled[l] = pooled;
            profile.thresholds[l] = inf.tau;
            profile.calls[l] = call ? 1 : 0;
            profile.truth[l] = t ? 1 : 0;
            profile.roles[l] = confusion_role(call, t);
            profile.label_active[l] = 1;
        }
    }
    std::vector<PatientProfile> out;
    out.reserve(by_subject.size());
    for (auto& [subject, profile] : by_subject) out.push_back(std::move(profile));
    return out;
}

}  // namespace kinephen
