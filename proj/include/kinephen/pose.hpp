#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

struct Frame {
    double timestamp = 0;            // seconds from video onset
    long frame_index = 0;
    std::array<double, kNumLandmarks> x{};  // pixels, NaN = missing
    std::array<double, kNumLandmarks> y{};
    Condition condition = Condition::Unspecified;
    LabelVec annotations{};          // {0,1,2} per phenotype
};

struct WindowBound {
    double from = 0;
    double to = 0;
};

struct PoseSeries {
    std::string video_id;
    std::string subject_id;
    bool is_control = false;
    double fps = 0;
    std::vector<Frame> frames;
    std::vector<WindowBound> window_bounds;  // in order of first appearance
};

// Normalized [0,1] model outputs to integer pixel coordinates by floor
// scaling with the frame dimensions.
inline std::pair<long, long> pixel_from_normalized(double xn, double yn, long width, long height) {
    if (!(xn >= 0.0 && xn <= 1.0 && yn >= 0.0 && yn <= 1.0))
        throw InputError("normalized coordinate outside [0,1]");
    if (width <= 0 || height <= 0) throw InputError("non-positive frame dimensions");
    return {static_cast<long>(std::floor(xn * static_cast<double>(width))),
            static_cast<long>(std::floor(yn * static_cast<double>(height)))};
}

struct DisplacementChannel {
    Landmark landmark = Landmark::Nose;
    double fs = 0;
    std::vector<double> samples;  // NaN where either coordinate is missing
};

// d_t = sqrt(x_t^2 + y_t^2); missingness propagates.
inline DisplacementChannel displacement(const PoseSeries& series, Landmark lm) {
    DisplacementChannel ch;
    ch.landmark = lm;
    ch.fs = series.fps;
    ch.samples.reserve(series.frames.size());
    const int j = static_cast<int>(lm);
    for (const auto& f : series.frames) {
        if (is_missing(f.x[j]) || is_missing(f.y[j]))
            ch.samples.push_back(kMissing);
        else
            ch.samples.push_back(std::hypot(f.x[j], f.y[j]));
    }
    return ch;
}

// Per-label annotation census of one window.
struct LabelCounts {
    std::array<int, kNumPhenotypes> n0{};
    std::array<int, kNumPhenotypes> n1{};
    std::array<int, kNumPhenotypes> n2{};
};

struct WindowSpan {
    std::string window_id;
    std::size_t begin = 0;  // frame index range [begin, end)
    std::size_t end = 0;
    WindowBound bound;
    Condition condition = Condition::Unspecified;
    LabelCounts label_counts;
    bool short_window = false;  // fewer frames than the nominal bound implies
};

struct WindowCutReport {
    int empty_dropped = 0;
    int short_kept = 0;
};

// Cuts the annotation-defined windows out of a series. Membership is
// half-open: from <= timestamp < to. Empty windows are dropped and counted;
// windows with at least two frames are kept even when truncated by the end
// of the recording, flagged short.
inline std::vector<WindowSpan> cut_windows(const PoseSeries& series, WindowCutReport* report = nullptr) {
    std::vector<WindowSpan> out;
    int seq = 0;
    for (std::size_t wi = 0; wi < series.window_bounds.size(); ++wi) {
        const auto& b = series.window_bounds[wi];
        WindowSpan span;
        span.bound = b;
        std::size_t begin = series.frames.size(), end = 0;
        for (std::size_t i = 0; i < series.frames.size(); ++i) {
            const double t = series.frames[i].timestamp;
            if (t >= b.from && t < b.to) {
                begin = std::min(begin, i);
                end = std::max(end, i + 1);
            }
        }
        if (begin >= end || end - begin < 2) {
            if (report) ++report->empty_dropped;
            continue;
        }
        span.begin = begin;
        span.end = end;
        span.window_id = series.video_id + "_w" + std::to_string(seq++);
        span.condition = series.frames[begin].condition;
        // truncated by end-of-recording: last frame never reached the bound
        span.short_window = series.frames[end - 1].timestamp < b.to - 1.5 / series.fps;
        if (span.short_window && report) ++report->short_kept;
        for (std::size_t i = begin; i < end; ++i) {
            for (int l = 0; l < kNumPhenotypes; ++l) {
                switch (series.frames[i].annotations[l]) {
                    case 0: ++span.label_counts.n0[l]; break;
                    case 1: ++span.label_counts.n1[l]; break;
                    default: ++span.label_counts.n2[l]; break;
                }
            }
        }
        out.push_back(std::move(span));
    }
    return out;
}

}  // namespace kinephen
