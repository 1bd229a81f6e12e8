#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/fft.hpp"

namespace kinephen {

// The 22 per-landmark window descriptors, in export column order.
enum class Metric : int {
    Mean = 0,
    Std,
    Var,
    Median,
    Min,
    Max,
    Range,
    Iqr,
    Energy,
    Skew,
    Kurtosis,
    Slope,
    ZeroCross,
    MeanAbsAccel,
    FftPeakFreq,
    FftPeakAmp,
    HistEntropy,
    HiguchiFd,
    PermEntropy,
    RollMean3,
    RollMean5,
    RollMean7,
};

inline constexpr int kNumMetrics = 22;
inline constexpr int kNumFeatures = kNumLandmarks * kNumMetrics;  // 374

inline constexpr std::array<std::string_view, kNumMetrics> kMetricNames = {
    "mean",        "std",          "var",           "median",
    "min",         "max",          "range",         "iqr",
    "energy",      "skew",         "kurtosis",      "slope",
    "zero_cross",  "mean_abs_accel", "fft_peak_freq", "fft_peak_amp",
    "hist_entropy", "higuchi_fd",  "perm_entropy",  "rollmean_3",
    "rollmean_5",  "rollmean_7",
};

inline std::string_view metric_name(Metric m) { return kMetricNames[static_cast<int>(m)]; }

// Kinematic families grouping the descriptors for interpretation rollups.
enum class Family : int {
    BaselinePosture = 0,
    SustainedBias,
    Excursions,
    Variability,
    Rhythmicity,
    Directionality,
    IrregularityComplexity,
};

inline constexpr int kNumFamilies = 7;

inline constexpr std::array<std::string_view, kNumFamilies> kFamilyNames = {
    "baseline_posture", "sustained_bias", "excursions",
    "variability",      "rhythmicity",    "directionality",
    "irregularity_complexity",
};

inline std::string_view family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

inline Family metric_family(Metric m) {
    switch (m) {
        case Metric::Mean:
        case Metric::Median:
            return Family::BaselinePosture;
        case Metric::RollMean3:
        case Metric::RollMean5:
        case Metric::RollMean7:
            return Family::SustainedBias;
        case Metric::Min:
        case Metric::Max:
            return Family::Excursions;
        case Metric::Std:
        case Metric::Var:
        case Metric::Range:
        case Metric::Iqr:
        case Metric::Energy:
            return Family::Variability;
        case Metric::FftPeakFreq:
        case Metric::FftPeakAmp:
            return Family::Rhythmicity;
        case Metric::Slope:
        case Metric::ZeroCross:
            return Family::Directionality;
        case Metric::Skew:
        case Metric::Kurtosis:
        case Metric::MeanAbsAccel:
        case Metric::HistEntropy:
        case Metric::HiguchiFd:
        case Metric::PermEntropy:
            return Family::IrregularityComplexity;
    }
    return Family::IrregularityComplexity;
}

// Landmark-major flattening: feature i covers landmark i/22, metric i%22.
inline int feature_index(Landmark lm, Metric m) {
    return static_cast<int>(lm) * kNumMetrics + static_cast<int>(m);
}

inline Landmark feature_landmark(int index) { return static_cast<Landmark>(index / kNumMetrics); }
inline Metric feature_metric(int index) { return static_cast<Metric>(index % kNumMetrics); }

// "<side>_<landmark>_distance_<metric>", e.g. right_wrist_distance_fft_peak_amp.
inline std::string feature_name(Landmark lm, Metric m) {
    std::string s(landmark_name(lm));
    s += "_distance_";
    s += metric_name(m);
    return s;
}

inline std::string feature_name(int index) {
    return feature_name(feature_landmark(index), feature_metric(index));
}

inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.reserve(kNumFeatures);
        for (int i = 0; i < kNumFeatures; ++i) v.push_back(feature_name(i));
        return v;
    }();
    return names;
}

// ---------------------------------------------------------------------------
// Signal descriptors. All operate on a window of one landmark's displacement
// signal; missing samples are removed before any of these run.
// ---------------------------------------------------------------------------

// Delta s(t) = s(t) - s(t-1), with the prepend convention Delta s(0) = 0.
inline std::vector<double> first_diff(std::span<const double> s) {
    std::vector<double> d(s.size(), 0.0);
    for (std::size_t t = 1; t < s.size(); ++t) d[t] = s[t] - s[t - 1];
    return d;
}

// a(t) = |Delta s(t) - Delta s(t-1)|, same prepend convention.
inline std::vector<double> accel_mag(std::span<const double> s) {
    auto d = first_diff(s);
    auto a = first_diff(d);
    for (auto& v : a) v = std::abs(v);
    return a;
}

struct Distributional {
    double mean = 0, std_dev = 0, var = 0, median = 0, min = 0, max = 0;
    double range = 0, iqr = 0, energy = 0, skew = 0, kurtosis = 0;
};

// Population std; excess kurtosis; zero-variance signals report skew and
// kurtosis of 0. `sample_std` switches the dispersion pair to the N-1 form.
inline Distributional distributional(std::span<const double> s, bool sample_std = false) {
    Distributional d;
    const auto n = static_cast<double>(s.size());
    d.mean = vec_mean(s);
    const double var_pop = vec_var(s, d.mean);
    d.var = sample_std && s.size() > 1 ? var_pop * n / (n - 1.0) : var_pop;
    d.std_dev = std::sqrt(d.var);
    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.max = sorted.back();
    d.range = d.max - d.min;
    d.median = quantile_sorted(sorted, 0.5);
    d.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    for (double v : s) d.energy += v * v;
    const double sigma = std::sqrt(var_pop);
    if (sigma > 0) {
        double m3 = 0, m4 = 0;
        for (double v : s) {
            const double z = (v - d.mean) / sigma;
            m3 += z * z * z;
            m4 += z * z * z * z;
        }
        d.skew = m3 / n;
        d.kurtosis = m4 / n - 3.0;
    }
    return d;
}

// Slope of the least-squares line over t = 0..N-1.
inline double trend_slope(std::span<const double> s) {
    const auto n = static_cast<double>(s.size());
    const double tmean = (n - 1.0) / 2.0;
    const double smean = vec_mean(s);
    double num = 0, den = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const double dt = static_cast<double>(t) - tmean;
        num += dt * (s[t] - smean);
        den += dt * dt;
    }
    return den > 0 ? num / den : 0.0;
}

// Number of strict sign reversals in the first-difference sequence (the
// prepended zero is excluded).
inline int zero_crossings(std::span<const double> s) {
    int count = 0;
    if (s.size() < 3) return 0;
    double prev = s[1] - s[0];
    for (std::size_t t = 2; t < s.size(); ++t) {
        const double cur = s[t] - s[t - 1];
        if (prev * cur < 0) ++count;
        prev = cur;
    }
    return count;
}

struct SpectralPeak {
    double freq = 0;
    double amp = 0;
};

// Dominant non-DC spectral component over bins 1..floor(N/2); ties go to the
// lowest frequency.
inline SpectralPeak fft_peak(std::span<const double> s, double fs) {
    SpectralPeak p;
    const std::size_t n = s.size();
    if (n < 2) return p;
    auto spec = fft_forward_real(std::vector<double>(s.begin(), s.end()));
    const std::size_t kmax = n / 2;
    std::size_t kbest = 1;
    double best = std::abs(spec[1]);
    for (std::size_t k = 2; k <= kmax; ++k) {
        const double a = std::abs(spec[k]);
        if (a > best) {
            best = a;
            kbest = k;
        }
    }
    p.freq = static_cast<double>(kbest) * fs / static_cast<double>(n);
    p.amp = best;
    return p;
}

// Shannon entropy of a 10-bin histogram over [min, max], bin masses
// normalized to sum to one; zero range yields 0.
inline double hist_entropy(std::span<const double> s) {
    constexpr int kBins = 10;
    constexpr double kEps = 1e-12;
    double lo = s[0], hi = s[0];
    for (double v : s) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) return 0.0;
    std::array<double, kBins> counts{};
    const double width = (hi - lo) / kBins;
    for (double v : s) {
        int b = static_cast<int>((v - lo) / width);
        if (b >= kBins) b = kBins - 1;  // max lands in the last bin
        counts[b] += 1.0;
    }
    double h = 0.0;
    const auto n = static_cast<double>(s.size());
    for (double c : counts) {
        const double pm = c / n;
        if (pm > 0) h -= pm * std::log(pm + kEps);
    }
    return h;
}

// Higuchi fractal dimension with the standard curve-length normalization
// (N-1)/(floor((N-m)/k) * k) per sub-series, k = 1..kmax, log-log regression.
// Degenerate signals (no usable increments) report 1.0.
inline double higuchi_fd(std::span<const double> s, int kmax = 5) {
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    if (n < 4) return 1.0;
    kmax = std::min<std::ptrdiff_t>(kmax, n - 2);
    if (kmax < 2) return 1.0;
    std::vector<double> log_k, log_l;
    for (std::ptrdiff_t k = 1; k <= kmax; ++k) {
        double lk = 0.0;
        int used = 0;
        for (std::ptrdiff_t m = 0; m < k; ++m) {
            const std::ptrdiff_t terms = (n - 1 - m) / k;
            if (terms < 1) continue;
            double length = 0.0;
            for (std::ptrdiff_t i = 1; i <= terms; ++i)
                length += std::abs(s[m + i * k] - s[m + (i - 1) * k]);
            length *= static_cast<double>(n - 1) / (static_cast<double>(terms) * k);
            lk += length / static_cast<double>(k);
            ++used;
        }
        if (used == 0) continue;
        lk /= used;
        if (lk <= 0) return 1.0;  // flat at this scale: treat as degenerate
        log_k.push_back(std::log(static_cast<double>(k)));
        log_l.push_back(std::log(lk));
    }
    if (log_k.size() < 2) return 1.0;
    // negative slope of log L(k) vs log k
    const double xm = vec_mean(log_k), ym = vec_mean(log_l);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_k.size(); ++i) {
        num += (log_k[i] - xm) * (log_l[i] - ym);
        den += (log_k[i] - xm) * (log_k[i] - xm);
    }
    return den > 0 ? -num / den : 1.0;
}

// Ordinal-pattern (permutation) entropy, natural log, unnormalized.
// Ties inside an embedding vector resolve by stable index order.
inline double perm_entropy(std::span<const double> s, int order = 3, int tau = 1) {
    constexpr double kEps = 1e-12;
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    const std::ptrdiff_t count = n - static_cast<std::ptrdiff_t>(order - 1) * tau;
    if (count < 1) return 0.0;
    std::map<std::vector<int>, std::ptrdiff_t> census;
    std::vector<int> idx(order);
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        for (int i = 0; i < order; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return s[t + static_cast<std::ptrdiff_t>(a) * tau] < s[t + static_cast<std::ptrdiff_t>(b) * tau];
        });
        ++census[idx];
    }
    double h = 0.0;
    for (const auto& [pattern, c] : census) {
        const double p = static_cast<double>(c) / static_cast<double>(count);
        h -= p * std::log(p + kEps);
    }
    return h;
}

// Time-average of the centered rolling mean with window w (edges truncated,
// min_periods = 1).
inline double rolling_mean_feature(std::span<const double> s, int w) {
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    const std::ptrdiff_t half = (w - 1) / 2;
    double acc = 0.0;
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - half);
        const std::ptrdiff_t hi = std::min(n - 1, t + half);
        double m = 0.0;
        for (std::ptrdiff_t u = lo; u <= hi; ++u) m += s[u];
        acc += m / static_cast<double>(hi - lo + 1);
    }
    return acc / static_cast<double>(n);
}

struct DescriptorOptions {
    bool sample_std = false;    // N-1 dispersion instead of population
    bool detrend_fft = false;   // remove the least-squares line before the FFT
    int higuchi_kmax = 5;
    int pe_order = 3;
    int pe_tau = 1;
};

// All 22 descriptors of one window signal, in Metric order, sanitized.
inline std::array<double, kNumMetrics> compute_descriptors(std::span<const double> s, double fs,
                                                           const DescriptorOptions& opt = {}) {
    std::array<double, kNumMetrics> out{};
    const auto d = distributional(s, opt.sample_std);
    out[static_cast<int>(Metric::Mean)] = d.mean;
    out[static_cast<int>(Metric::Std)] = d.std_dev;
    out[static_cast<int>(Metric::Var)] = d.var;
    out[static_cast<int>(Metric::Median)] = d.median;
    out[static_cast<int>(Metric::Min)] = d.min;
    out[static_cast<int>(Metric::Max)] = d.max;
    out[static_cast<int>(Metric::Range)] = d.range;
    out[static_cast<int>(Metric::Iqr)] = d.iqr;
    out[static_cast<int>(Metric::Energy)] = d.energy;
    out[static_cast<int>(Metric::Skew)] = d.skew;
    out[static_cast<int>(Metric::Kurtosis)] = d.kurtosis;
    out[static_cast<int>(Metric::Slope)] = trend_slope(s);
    out[static_cast<int>(Metric::ZeroCross)] = zero_crossings(s);
    out[static_cast<int>(Metric::MeanAbsAccel)] = vec_mean(accel_mag(s));
    SpectralPeak peak;
    if (s.size() >= 4) {
        if (opt.detrend_fft) {
            const double slope = trend_slope(s);
            const double smean = vec_mean(s);
            const double tmean = (static_cast<double>(s.size()) - 1.0) / 2.0;
            std::vector<double> resid(s.size());
            for (std::size_t t = 0; t < s.size(); ++t)
                resid[t] = s[t] - (smean + slope * (static_cast<double>(t) - tmean));
            peak = fft_peak(resid, fs);
        } else {
            peak = fft_peak(s, fs);
        }
    }
    out[static_cast<int>(Metric::FftPeakFreq)] = peak.freq;
    out[static_cast<int>(Metric::FftPeakAmp)] = peak.amp;
    out[static_cast<int>(Metric::HistEntropy)] = hist_entropy(s);
    out[static_cast<int>(Metric::HiguchiFd)] = higuchi_fd(s, opt.higuchi_kmax);
    out[static_cast<int>(Metric::PermEntropy)] = perm_entropy(s, opt.pe_order, opt.pe_tau);
    out[static_cast<int>(Metric::RollMean3)] = rolling_mean_feature(s, 3);
    out[static_cast<int>(Metric::RollMean5)] = rolling_mean_feature(s, 5);
    out[static_cast<int>(Metric::RollMean7)] = rolling_mean_feature(s, 7);
    for (auto& v : out) v = sanitize_value(v);
    return out;
}

// One extracted window: 374 named values plus metadata and the tri-state
// per-label annotation summary (0 absent, 1 present, 2 contained uncertainty).
struct WindowFeatures {
    std::string window_id;
    std::string subject_id;
    bool is_control = false;
    Condition condition = Condition::Unspecified;
    LabelVec labels{};
    std::array<double, kNumFeatures> values{};
};

struct SkippedWindow {
    std::string window_id;
    std::string reason;
};

// 374-vector over the 17 per-landmark window signals (missing samples already
// removed); returns false when any channel has fewer than two present samples.
inline bool extract_window(const std::array<std::vector<double>, kNumLandmarks>& channels, double fs,
                           std::array<double, kNumFeatures>& out, const DescriptorOptions& opt = {}) {
    for (const auto& ch : channels)
        if (ch.size() < 2) return false;
    for (int lm = 0; lm < kNumLandmarks; ++lm) {
        const auto desc = compute_descriptors(channels[lm], fs, opt);
        std::copy(desc.begin(), desc.end(), out.begin() + lm * kNumMetrics);
    }
    return true;
}

}  // namespace kinephen
