#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"
#include "kinephen/extract.hpp"
#include "kinephen/features.hpp"
#include "kinephen/pose.hpp"

namespace kinephen {

enum class WindowLabel : int { Negative = 0, Positive = 1, Excluded = 2 };

// Any uncertain annotation excludes the window; otherwise any positive frame
// makes it positive.
inline WindowLabel window_label(std::span<const std::uint8_t> raw_annotations) {
    bool any1 = false;
    for (auto v : raw_annotations) {
        if (v == 2) return WindowLabel::Excluded;
        if (v == 1) any1 = true;
    }
    return any1 ? WindowLabel::Positive : WindowLabel::Negative;
}

// Tri-state per-window summaries (as stored on WindowFeatures) carry the same
// information: 2 = contained uncertainty.
inline WindowLabel window_label_from_status(std::uint8_t status) {
    return static_cast<WindowLabel>(status);
}

struct LabelDropCounts {
    int uncertain = 0;
    int patient_negative = 0;
};

// Window-level screening set for one phenotype: symptom-positive patient
// windows against control windows. Rows index into the source window table.
struct ScreeningDataset {
    Phenotype phenotype = Phenotype::Dystonia;
    std::vector<int> window_idx;
    std::vector<std::uint8_t> y;
    LabelDropCounts drops;
};

inline ScreeningDataset build_screening(const std::vector<WindowFeatures>& windows, Phenotype ph) {
    ScreeningDataset ds;
    ds.phenotype = ph;
    const int l = static_cast<int>(ph);
    int n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto status = window_label_from_status(windows[i].labels[l]);
        if (status == WindowLabel::Excluded) {
            ++ds.drops.uncertain;
            continue;
        }
        const bool positive = status == WindowLabel::Positive;
        if (!positive && !windows[i].is_control) {
            ++ds.drops.patient_negative;
            continue;
        }
        ds.window_idx.push_back(static_cast<int>(i));
        ds.y.push_back(positive ? 1 : 0);
        (positive ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateDataset("screening dataset for " + std::string(phenotype_name(ph)) +
                                " lacks a class (pos=" + std::to_string(n_pos) +
                                ", neg=" + std::to_string(n_neg) + ")");
    return ds;
}

using LabelMask = std::array<bool, kNumPhenotypes>;

inline LabelMask all_labels() {
    LabelMask m;
    m.fill(true);
    return m;
}

// Eight-label corpus with per-label masking: a window uncertain for one
// phenotype stays usable for the others.
struct MultiLabelDataset {
    std::vector<int> window_idx;
    std::vector<LabelVec> y;      // {0,1}; masked-out bits are 0
    std::vector<LabelVec> valid;  // 1 where the label is usable for this row
    std::map<std::string, LabelVec> subject_or_labels;
    LabelMask mask = all_labels();
    int dropped_all_zero = 0;
};

inline MultiLabelDataset build_multilabel(const std::vector<WindowFeatures>& windows,
                                          bool include_all_zero = true,
                                          const LabelMask& mask = all_labels()) {
    MultiLabelDataset ds;
    ds.mask = mask;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        LabelVec y{}, valid{};
        bool any_positive = false;
        for (int l = 0; l < kNumPhenotypes; ++l) {
            if (!mask[l]) continue;
            const auto status = window_label_from_status(windows[i].labels[l]);
            if (status == WindowLabel::Excluded) continue;
            valid[l] = 1;
            y[l] = status == WindowLabel::Positive ? 1 : 0;
            any_positive = any_positive || y[l] == 1;
        }
        if (!any_positive && !include_all_zero) {
            ++ds.dropped_all_zero;
            continue;
        }
        ds.window_idx.push_back(static_cast<int>(i));
        ds.y.push_back(y);
        ds.valid.push_back(valid);
        auto& subject_or = ds.subject_or_labels[windows[i].subject_id];
        for (int l = 0; l < kNumPhenotypes; ++l)
            if (valid[l] && y[l]) subject_or[l] = 1;
    }
    return ds;
}

// One aggregated sample per subject: retained windows concatenated into a
// single long signal per landmark, features computed once on the result.
struct SubjectSample {
    std::string subject_id;
    bool is_control = false;
    std::uint8_t y = 0;
    std::array<double, kNumFeatures> values{};
};

struct SubjectAggregateReport {
    std::vector<std::string> excluded_subjects;  // no retained windows
    DropReport drops;
};

namespace detail {

struct ConcatState {
    std::array<std::vector<double>, kNumLandmarks> signals;
    bool is_control = false;
    bool any_window = false;
    bool has_uncertain = false;  // used by the condition task only
    bool any_positive = false;
    double fs = 30.0;
};

// Appends one window's present displacement samples to the subject's
// concatenated signals, honoring the missing policy.
inline bool append_window(ConcatState& state,
                          const std::array<DisplacementChannel, kNumLandmarks>& channels,
                          const WindowSpan& span, const ExtractOptions& opt, DropReport& drops) {
    std::array<std::vector<double>, kNumLandmarks> parts;
    for (int j = 0; j < kNumLandmarks; ++j) {
        std::size_t missing = 0;
        for (std::size_t i = span.begin; i < span.end; ++i) {
            if (is_missing(channels[j].samples[i]))
                ++missing;
            else
                parts[j].push_back(channels[j].samples[i]);
        }
        const double frac = static_cast<double>(missing) / static_cast<double>(span.end - span.begin);
        if (frac > opt.max_missing_frac) {
            ++drops.missing_data;
            return false;
        }
    }
    for (int j = 0; j < kNumLandmarks; ++j)
        state.signals[j].insert(state.signals[j].end(), parts[j].begin(), parts[j].end());
    state.any_window = true;
    return true;
}

}  // namespace detail

// Symptom-enriched per-subject series: controls keep every non-uncertain
// window, patients keep only windows where the phenotype was marked present.
inline std::vector<SubjectSample> build_symptom_enriched(const std::vector<PoseSeries>& series_list,
                                                         Phenotype ph, const ExtractOptions& opt,
                                                         SubjectAggregateReport& report) {
    const int l = static_cast<int>(ph);
    std::map<std::string, detail::ConcatState> by_subject;
    std::vector<std::string> order;

    for (const auto& series : series_list) {
        std::array<DisplacementChannel, kNumLandmarks> channels;
        for (int j = 0; j < kNumLandmarks; ++j)
            channels[j] = displacement(series, static_cast<Landmark>(j));
        WindowCutReport cut_report;
        const auto spans = cut_windows(series, &cut_report);
        report.drops.empty_windows += cut_report.empty_dropped;

        if (!by_subject.count(series.subject_id)) order.push_back(series.subject_id);
        auto& state = by_subject[series.subject_id];
        state.is_control = series.is_control;
        state.fs = series.fps;
        for (const auto& span : spans) {
            if (span.label_counts.n2[l] > 0) continue;  // uncertainty exclusion
            const bool positive = span.label_counts.n1[l] > 0;
            if (!series.is_control && !positive) continue;
            detail::append_window(state, channels, span, opt, report.drops);
        }
    }

    std::vector<SubjectSample> out;
    for (const auto& subject : order) {
        auto& state = by_subject[subject];
        bool usable = state.any_window;
        for (const auto& sig : state.signals)
            if (sig.size() < 2) usable = false;
        if (!usable) {
            report.excluded_subjects.push_back(subject);
            continue;
        }
        SubjectSample sample;
        sample.subject_id = subject;
        sample.is_control = state.is_control;
        sample.y = state.is_control ? 0 : 1;
        extract_window(state.signals, state.fs, sample.values, opt.descriptors);
        out.push_back(std::move(sample));
    }
    return out;
}

// Condition-specific per-subject sample: every window recorded under the
// requested condition is merged; positive if the phenotype was present in any
// frame of the merged series; any uncertainty excludes the subject sample.
inline std::vector<SubjectSample> build_condition(const std::vector<PoseSeries>& series_list,
                                                  Phenotype ph, Condition condition,
                                                  const ExtractOptions& opt,
                                                  SubjectAggregateReport& report) {
    const int l = static_cast<int>(ph);
    std::map<std::string, detail::ConcatState> by_subject;
    std::vector<std::string> order;

    for (const auto& series : series_list) {
        std::array<DisplacementChannel, kNumLandmarks> channels;
        for (int j = 0; j < kNumLandmarks; ++j)
            channels[j] = displacement(series, static_cast<Landmark>(j));
        const auto spans = cut_windows(series);

        if (!by_subject.count(series.subject_id)) order.push_back(series.subject_id);
        auto& state = by_subject[series.subject_id];
        state.is_control = series.is_control;
        state.fs = series.fps;
        for (const auto& span : spans) {
            if (span.condition != condition) continue;
            if (span.label_counts.n2[l] > 0) state.has_uncertain = true;
            if (span.label_counts.n1[l] > 0) state.any_positive = true;
            detail::append_window(state, channels, span, opt, report.drops);
        }
    }

    std::vector<SubjectSample> out;
    for (const auto& subject : order) {
        auto& state = by_subject[subject];
        if (!state.any_window) continue;  // no sample for this condition
        if (state.has_uncertain) {
            report.excluded_subjects.push_back(subject);
            continue;
        }
        bool usable = true;
        for (const auto& sig : state.signals)
            if (sig.size() < 2) usable = false;
        if (!usable) {
            report.excluded_subjects.push_back(subject);
            continue;
        }
        SubjectSample sample;
        sample.subject_id = subject;
        sample.is_control = state.is_control;
        sample.y = state.any_positive ? 1 : 0;
        extract_window(state.signals, state.fs, sample.values, opt.descriptors);
        out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace kinephen
