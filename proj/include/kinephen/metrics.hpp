#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kinephen/decide.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

// Rank-based (Mann-Whitney) ROC-AUC with mid-rank tie handling. Returns
// nullopt when only one class is present (skipped-with-flag semantics).
inline std::optional<double> roc_auc(std::span<const double> scores,
                                     std::span<const std::uint8_t> truth) {
    const std::size_t n = scores.size();
    double n_pos = 0;
    for (auto t : truth) n_pos += t ? 1.0 : 0.0;
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum = 0;
    for (std::size_t r = 0; r < n; ++r)
        if (truth[r]) rank_sum += rank[r];
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

// Step-wise average precision over the descending-score sweep, tied scores
// grouped into one step. Returns nullopt when there are no positives.
inline std::optional<double> average_precision(std::span<const double> scores,
                                               std::span<const std::uint8_t> truth) {
    const std::size_t n = scores.size();
    double n_pos = 0;
    for (auto t : truth) n_pos += t ? 1.0 : 0.0;
    if (n_pos == 0) return std::nullopt;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
    double tp = 0, fp = 0, ap = 0, prev_recall = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) (truth[order[k]] ? tp : fp) += 1.0;
        const double recall = tp / n_pos;
        const double precision = tp / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return ap;
}

// Window- or subject-level binary summary. F1 with an empty denominator is
// reported as 0 and flagged.
struct BinaryMetrics {
    double f1_pos = 0, f1_neg = 0, accuracy = 0;
    std::optional<double> roc_auc;
    std::optional<double> auprc;
    double sensitivity = 0, specificity = 0;
    long tp = 0, tn = 0, fp = 0, fn = 0;
    bool f1_pos_degenerate = false;
    bool f1_neg_degenerate = false;
};

inline BinaryMetrics binary_metrics(std::span<const std::uint8_t> calls,
                                    std::span<const std::uint8_t> truth,
                                    std::span<const double> scores = {}) {
    BinaryMetrics m;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (calls[i] && truth[i]) ++m.tp;
        else if (!calls[i] && !truth[i]) ++m.tn;
        else if (calls[i]) ++m.fp;
        else ++m.fn;
    }
    const double n = static_cast<double>(calls.size());
    m.accuracy = n > 0 ? (m.tp + m.tn) / n : 0;
    const double denom_pos = 2.0 * m.tp + m.fp + m.fn;
    if (denom_pos > 0) m.f1_pos = 2.0 * m.tp / denom_pos;
    else m.f1_pos_degenerate = true;
    const double denom_neg = 2.0 * m.tn + m.fp + m.fn;
    if (denom_neg > 0) m.f1_neg = 2.0 * m.tn / denom_neg;
    else m.f1_neg_degenerate = true;
    m.sensitivity = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0;
    m.specificity = m.tn + m.fp > 0 ? static_cast<double>(m.tn) / (m.tn + m.fp) : 0;
    if (!scores.empty()) {
        m.roc_auc = roc_auc(scores, truth);
        m.auprc = average_precision(scores, truth);
    }
    return m;
}

struct PerLabelStats {
    Phenotype label = Phenotype::Dystonia;
    long tp = 0, tn = 0, fp = 0, fn = 0;
    double precision = 0, recall = 0, specificity = 0, f1 = 0;
    long control_fp = 0;
    std::optional<double> auc;
    std::optional<double> auprc;
};

// Patient-level multi-label summary. Macro averages skip labels lacking both
// classes (the skipped set is reported); a sample-wise Jaccard with an empty
// union counts as perfect agreement.
struct MultiLabelMetrics {
    std::optional<double> macro_auc;
    std::optional<double> macro_auprc;
    double micro_f1 = 0, macro_f1 = 0;
    double hamming_acc = 0;
    double jaccard_samples = 0;
    double exact_match = 0;
    std::array<PerLabelStats, kNumPhenotypes> per_label{};
    std::vector<Phenotype> skipped_labels;
    int n_subjects = 0;
};

inline MultiLabelMetrics multilabel_summary(std::span<const PatientProfile> profiles) {
    if (profiles.empty()) throw InputError("multilabel_summary on empty profile list");
    MultiLabelMetrics m;
    m.n_subjects = static_cast<int>(profiles.size());

    std::array<bool, kNumPhenotypes> active{};
    for (int l = 0; l < kNumPhenotypes; ++l) active[l] = profiles[0].label_active[l] != 0;

    double bits_total = 0, bits_wrong = 0;
    double jaccard_acc = 0, exact_acc = 0;
    double micro_tp = 0, micro_fp = 0, micro_fn = 0;

    for (const auto& p : profiles) {
        long inter = 0, uni = 0;
        bool all_match = true;
        for (int l = 0; l < kNumPhenotypes; ++l) {
            if (!active[l]) continue;
            bits_total += 1.0;
            const bool call = p.calls[l] != 0, truth = p.truth[l] != 0;
            if (call != truth) {
                bits_wrong += 1.0;
                all_match = false;
            }
            if (call && truth) ++inter;
            if (call || truth) ++uni;
            if (call && truth) micro_tp += 1.0;
            if (call && !truth) micro_fp += 1.0;
            if (!call && truth) micro_fn += 1.0;
        }
        jaccard_acc += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
        exact_acc += all_match ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(profiles.size());
    m.hamming_acc = bits_total > 0 ? 1.0 - bits_wrong / bits_total : 1.0;
    m.jaccard_samples = jaccard_acc / n;
    m.exact_match = exact_acc / n;
    const double micro_denom = 2.0 * micro_tp + micro_fp + micro_fn;
    m.micro_f1 = micro_denom > 0 ? 2.0 * micro_tp / micro_denom : 0;

    double macro_f1_acc = 0, macro_auc_acc = 0, macro_ap_acc = 0;
    int f1_labels = 0, auc_labels = 0, ap_labels = 0;
    for (int l = 0; l < kNumPhenotypes; ++l) {
        if (!active[l]) continue;
        auto& s = m.per_label[l];
        s.label = static_cast<Phenotype>(l);
        std::vector<double> pooled;
        std::vector<std::uint8_t> truth, calls;
        for (const auto& p : profiles) {
            pooled.push_back(p.pooled[l]);
            truth.push_back(p.truth[l]);
            calls.push_back(p.calls[l]);
            if (p.calls[l] && !p.truth[l] && p.is_control) ++s.control_fp;
            if (p.calls[l] && p.truth[l]) ++s.tp;
            else if (!p.calls[l] && !p.truth[l]) ++s.tn;
            else if (p.calls[l]) ++s.fp;
            else ++s.fn;
        }
        s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0;
        s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0;
        s.specificity = s.tn + s.fp > 0 ? static_cast<double>(s.tn) / (s.tn + s.fp) : 0;
        const double fd = 2.0 * s.tp + s.fp + s.fn;
        s.f1 = fd > 0 ? 2.0 * s.tp / fd : 0;
        s.auc = roc_auc(pooled, truth);
        s.auprc = average_precision(pooled, truth);

        const bool both_classes = (s.tp + s.fn) > 0 && (s.tn + s.fp) > 0;
        if (both_classes) {
            macro_f1_acc += s.f1;
            ++f1_labels;
            if (s.auc) {
                macro_auc_acc += *s.auc;
                ++auc_labels;
            }
            if (s.auprc) {
                macro_ap_acc += *s.auprc;
                ++ap_labels;
            }
        } else {
            m.skipped_labels.push_back(static_cast<Phenotype>(l));
        }
    }
    m.macro_f1 = f1_labels > 0 ? macro_f1_acc / f1_labels : 0;
    if (auc_labels > 0) m.macro_auc = macro_auc_acc / auc_labels;
    if (ap_labels > 0) m.macro_auprc = macro_ap_acc / ap_labels;
    return m;
}

}  // namespace kinephen
