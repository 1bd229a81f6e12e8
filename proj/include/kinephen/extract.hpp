#pragma once

#include <array>
#include <string>
#include <vector>

#include "kinephen/features.hpp"
#include "kinephen/pose.hpp"

namespace kinephen {

struct ExtractOptions {
    DescriptorOptions descriptors;
    // Fraction of missing displacement samples tolerated per channel before a
    // window is dropped. 0 keeps the strict any-missing rule.
    double max_missing_frac = 0.0;
};

struct DropReport {
    int empty_windows = 0;
    int short_windows_kept = 0;
    int missing_data = 0;
    int too_few_samples = 0;

    DropReport& operator+=(const DropReport& o) {
        empty_windows += o.empty_windows;
        short_windows_kept += o.short_windows_kept;
        missing_data += o.missing_data;
        too_few_samples += o.too_few_samples;
        return *this;
    }
};

// Windowed 374-feature rows for one series. Windows violating the missing
// policy or holding fewer than two present samples in some channel are
// dropped and tallied, never silently.
inline std::vector<WindowFeatures> extract_features(const PoseSeries& series,
                                                    const ExtractOptions& opt, DropReport& report) {
    std::array<DisplacementChannel, kNumLandmarks> channels;
    for (int j = 0; j < kNumLandmarks; ++j)
        channels[j] = displacement(series, static_cast<Landmark>(j));

    WindowCutReport cut_report;
    const auto spans = cut_windows(series, &cut_report);
    report.empty_windows += cut_report.empty_dropped;
    report.short_windows_kept += cut_report.short_kept;

    std::vector<WindowFeatures> out;
    out.reserve(spans.size());
    for (const auto& span : spans) {
        std::array<std::vector<double>, kNumLandmarks> sig;
        bool too_missing = false;
        for (int j = 0; j < kNumLandmarks && !too_missing; ++j) {
            const auto& samples = channels[j].samples;
            std::size_t missing = 0;
            auto& s = sig[j];
            s.reserve(span.end - span.begin);
            for (std::size_t i = span.begin; i < span.end; ++i) {
                if (is_missing(samples[i]))
                    ++missing;
                else
                    s.push_back(samples[i]);
            }
            const double frac =
                static_cast<double>(missing) / static_cast<double>(span.end - span.begin);
            if (frac > opt.max_missing_frac) too_missing = true;
        }
        if (too_missing) {
            ++report.missing_data;
            continue;
        }
        WindowFeatures wf;
        if (!extract_window(sig, series.fps, wf.values, opt.descriptors)) {
            ++report.too_few_samples;
            continue;
        }
        wf.window_id = span.window_id;
        wf.subject_id = series.subject_id;
        wf.is_control = series.is_control;
        wf.condition = span.condition;
        for (int l = 0; l < kNumPhenotypes; ++l) {
            if (span.label_counts.n2[l] > 0)
                wf.labels[l] = 2;
            else
                wf.labels[l] = span.label_counts.n1[l] > 0 ? 1 : 0;
        }
        out.push_back(std::move(wf));
    }
    return out;
}

}  // namespace kinephen
