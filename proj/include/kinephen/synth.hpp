#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinephen/core.hpp"
#include "kinephen/csv.hpp"
#include "kinephen/domain.hpp"
#include "kinephen/pose.hpp"

namespace kinephen {

// Phenotype-archetype signal generators with known ground truth; the
// desk-scale stand-in for a clinical cohort.
enum class ArchetypeKind : int { Oscillatory = 0, Spike, DriftReversal, Quiescent };

struct ArchetypeSpec {
    ArchetypeKind kind = ArchetypeKind::Quiescent;
    double freq_hz = 5.0;      // oscillatory tone
    double amp_px = 20.0;      // oscillatory / spike / drift amplitude
    double rate_per_s = 0.5;   // spike event rate
    double period_s = 4.0;     // drift reversal period
    double noise_std_px = 2.0; // quiescent-only extra noise
    std::vector<Landmark> targets;
    LabelVec label_bits{};
};

struct SubjectSpec {
    std::string subject_id;
    bool is_control = false;
    std::vector<ArchetypeSpec> archetypes;
};

struct CohortSpec {
    std::vector<SubjectSpec> subjects;
    double fs = 30.0;
    int windows_per_subject = 60;
    double window_seconds = 10.0;
    double negative_window_frac = 0.3;   // symptom-off windows per archetype
    double uncertain_window_frac = 0.0;  // windows annotated 2 for the archetype labels
    double base_noise_std = 2.0;
    std::uint64_t seed = 42;
};

namespace detail {

inline double triangle_wave(double t, double period) {
    const double phase = t / period - std::floor(t / period + 0.5);
    return 2.0 * std::abs(2.0 * phase) - 1.0;
}

// Half-cosine pulses (100 ms wide) at Poisson event times within [0, span).
inline std::vector<std::pair<double, double>> spike_events(double span, double rate,
                                                           std::mt19937_64& rng) {
    std::vector<std::pair<double, double>> events;  // (start, width)
    std::exponential_distribution<double> gap(rate);
    double t = gap(rng);
    while (t < span) {
        events.emplace_back(t, 0.1);
        t += gap(rng);
    }
    return events;
}

}  // namespace detail

inline PoseSeries generate_series(const CohortSpec& cohort, int subject_index) {
    const auto& subj = cohort.subjects[subject_index];
    const auto sidx = static_cast<std::uint64_t>(subject_index);
    const int frames_per_window =
        static_cast<int>(std::lround(cohort.window_seconds * cohort.fs));
    const int n_frames = cohort.windows_per_subject * frames_per_window;
    const int n_windows = cohort.windows_per_subject;

    PoseSeries series;
    series.video_id = subj.subject_id + "_v0";
    series.subject_id = subj.subject_id;
    series.is_control = subj.is_control;
    series.fps = cohort.fs;

    // per-archetype window activity and uncertainty flags
    auto flag_rng = make_rng(mix_seed(cohort.seed, sidx, 0xf1a6));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<bool>> active(subj.archetypes.size(),
                                          std::vector<bool>(n_windows, false));
    std::vector<std::vector<bool>> uncertain(subj.archetypes.size(),
                                             std::vector<bool>(n_windows, false));
    for (std::size_t a = 0; a < subj.archetypes.size(); ++a) {
        bool any_active = false;
        for (int w = 0; w < n_windows; ++w) {
            active[a][w] = unit(flag_rng) >= cohort.negative_window_frac;
            any_active = any_active || active[a][w];
        }
        if (!any_active && n_windows > 0) active[a][0] = true;
        int first_active = -1;
        for (int w = 0; w < n_windows; ++w)
            if (active[a][w]) {
                first_active = w;
                break;
            }
        for (int w = 0; w < n_windows; ++w) {
            if (w == first_active) continue;  // keep the label-bookkeeping anchor clean
            uncertain[a][w] = unit(flag_rng) < cohort.uncertain_window_frac;
        }
    }

    // spike event schedules (per archetype, global timeline)
    std::vector<std::vector<std::pair<double, double>>> spikes(subj.archetypes.size());
    for (std::size_t a = 0; a < subj.archetypes.size(); ++a) {
        if (subj.archetypes[a].kind != ArchetypeKind::Spike) continue;
        auto rng = make_rng(mix_seed(cohort.seed, sidx, 0x5e00 + a));
        spikes[a] = detail::spike_events(n_frames / cohort.fs, subj.archetypes[a].rate_per_s, rng);
    }

    // per-landmark deviation streams
    std::array<std::vector<double>, kNumLandmarks> deviation;
    for (int j = 0; j < kNumLandmarks; ++j) {
        deviation[j].assign(n_frames, 0.0);
        auto rng = make_rng(mix_seed(cohort.seed, sidx, 0x700 + j));
        std::normal_distribution<double> noise(0.0, cohort.base_noise_std);
        for (int i = 0; i < n_frames; ++i) deviation[j][i] = noise(rng);
    }
    for (std::size_t a = 0; a < subj.archetypes.size(); ++a) {
        const auto& arch = subj.archetypes[a];
        std::mt19937_64 qrng = make_rng(mix_seed(cohort.seed, sidx, 0x0900 + a));
        std::normal_distribution<double> qnoise(0.0, arch.noise_std_px);
        for (Landmark target : arch.targets) {
            const int j = static_cast<int>(target);
            for (int i = 0; i < n_frames; ++i) {
                const int w = i / frames_per_window;
                if (!active[a][w]) continue;
                const double t = i / cohort.fs;
                switch (arch.kind) {
                    case ArchetypeKind::Oscillatory:
                        deviation[j][i] +=
                            arch.amp_px * std::sin(2.0 * std::numbers::pi * arch.freq_hz * t);
                        break;
                    case ArchetypeKind::DriftReversal:
                        deviation[j][i] += arch.amp_px * detail::triangle_wave(t, arch.period_s);
                        break;
                    case ArchetypeKind::Spike:
                        for (const auto& [start, width] : spikes[a]) {
                            if (t >= start && t < start + width)
                                deviation[j][i] +=
                                    arch.amp_px * std::sin(std::numbers::pi * (t - start) / width);
                        }
                        break;
                    case ArchetypeKind::Quiescent:
                        deviation[j][i] += qnoise(qrng);
                        break;
                }
            }
        }
    }

    series.frames.resize(n_frames);
    for (int i = 0; i < n_frames; ++i) {
        auto& f = series.frames[i];
        f.timestamp = i / cohort.fs;
        f.frame_index = i;
        const int w = i / frames_per_window;
        f.condition = static_cast<Condition>(w % 3);
        for (int j = 0; j < kNumLandmarks; ++j) {
            const double r0 = 150.0 + 45.0 * j;
            const double theta = (10.0 + 4.5 * j) * std::numbers::pi / 180.0;
            const double r = std::max(1.0, r0 + deviation[j][i]);
            f.x[j] = r * std::cos(theta);
            f.y[j] = r * std::sin(theta);
        }
        for (std::size_t a = 0; a < subj.archetypes.size(); ++a) {
            for (int l = 0; l < kNumPhenotypes; ++l) {
                if (!subj.archetypes[a].label_bits[l]) continue;
                if (uncertain[a][w])
                    f.annotations[l] = 2;
                else if (active[a][w] && f.annotations[l] != 2)
                    f.annotations[l] = 1;
            }
        }
    }
    for (int w = 0; w < n_windows; ++w)
        series.window_bounds.push_back({w * cohort.window_seconds, (w + 1) * cohort.window_seconds});
    return series;
}

inline std::vector<PoseSeries> generate_cohort(const CohortSpec& cohort) {
    std::vector<PoseSeries> out;
    out.reserve(cohort.subjects.size());
    for (std::size_t i = 0; i < cohort.subjects.size(); ++i)
        out.push_back(generate_series(cohort, static_cast<int>(i)));
    return out;
}

// Writes one CSV per subject in the exact ingest format.
inline void write_series_csv(const PoseSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "timestamp,frame,subject_id,is_control,condition,from,to";
    for (int j = 0; j < kNumLandmarks; ++j)
        out << "," << kLandmarkNames[j] << "_x," << kLandmarkNames[j] << "_y";
    for (int l = 0; l < kNumPhenotypes; ++l) out << ",label_" << kPhenotypeNames[l];
    out << "\n";
    for (const auto& f : series.frames) {
        const WindowBound* bound = nullptr;
        for (const auto& b : series.window_bounds)
            if (f.timestamp >= b.from && f.timestamp < b.to) {
                bound = &b;
                break;
            }
        out << format_double(f.timestamp) << "," << f.frame_index << "," << series.subject_id << ","
            << (series.is_control ? 1 : 0) << "," << condition_name(f.condition) << ",";
        if (bound)
            out << format_double(bound->from) << "," << format_double(bound->to);
        else
            out << ",";
        for (int j = 0; j < kNumLandmarks; ++j) {
            out << ",";
            if (!is_missing(f.x[j])) out << format_double(f.x[j]);
            out << ",";
            if (!is_missing(f.y[j])) out << format_double(f.y[j]);
        }
        for (int l = 0; l < kNumPhenotypes; ++l) out << "," << static_cast<int>(f.annotations[l]);
        out << "\n";
    }
}

inline nlohmann::ordered_json cohort_manifest(const CohortSpec& cohort) {
    nlohmann::ordered_json j;
    j["seed"] = cohort.seed;
    j["fs"] = cohort.fs;
    j["windows_per_subject"] = cohort.windows_per_subject;
    j["window_seconds"] = cohort.window_seconds;
    j["negative_window_frac"] = cohort.negative_window_frac;
    j["uncertain_window_frac"] = cohort.uncertain_window_frac;
    auto& subjects = j["subjects"] = nlohmann::ordered_json::array();
    for (const auto& s : cohort.subjects) {
        nlohmann::ordered_json sj;
        sj["subject_id"] = s.subject_id;
        sj["is_control"] = s.is_control;
        auto& archs = sj["archetypes"] = nlohmann::ordered_json::array();
        for (const auto& a : s.archetypes) {
            nlohmann::ordered_json aj;
            switch (a.kind) {
                case ArchetypeKind::Oscillatory: aj["kind"] = "oscillatory"; break;
                case ArchetypeKind::Spike: aj["kind"] = "spike"; break;
                case ArchetypeKind::DriftReversal: aj["kind"] = "drift_reversal"; break;
                case ArchetypeKind::Quiescent: aj["kind"] = "quiescent"; break;
            }
            aj["targets"] = nlohmann::ordered_json::array();
            for (auto t : a.targets) aj["targets"].push_back(std::string(landmark_name(t)));
            aj["labels"] = nlohmann::ordered_json::array();
            for (int l = 0; l < kNumPhenotypes; ++l)
                if (a.label_bits[l]) aj["labels"].push_back(std::string(kPhenotypeNames[l]));
            archs.push_back(aj);
        }
        subjects.push_back(sj);
    }
    return j;
}

inline void write_cohort(const std::vector<PoseSeries>& cohort_series, const CohortSpec& cohort,
                         const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& series : cohort_series)
        write_series_csv(series, dir + "/" + series.subject_id + ".csv");
    std::ofstream out(dir + "/cohort.json");
    out << cohort_manifest(cohort).dump(2) << "\n";
}

// The standard synthetic evaluation cohort: oscillatory, spike and
// drift-reversal archetypes with co-occurring assignments, plus quiescent
// controls.
inline CohortSpec make_default_cohort(int n_patients, int n_controls, int windows_per_subject,
                                      std::uint64_t seed) {
    CohortSpec cohort;
    cohort.seed = seed;
    cohort.windows_per_subject = windows_per_subject;

    ArchetypeSpec tremor;
    tremor.kind = ArchetypeKind::Oscillatory;
    tremor.freq_hz = 5.0;
    tremor.amp_px = 20.0;
    tremor.targets = {Landmark::RightWrist};
    tremor.label_bits[static_cast<int>(Phenotype::Tremor)] = 1;

    ArchetypeSpec myoclonus;
    myoclonus.kind = ArchetypeKind::Spike;
    myoclonus.rate_per_s = 0.8;
    myoclonus.amp_px = 60.0;
    myoclonus.targets = {Landmark::LeftElbow};
    myoclonus.label_bits[static_cast<int>(Phenotype::Myoclonus)] = 1;

    ArchetypeSpec athetosis;
    athetosis.kind = ArchetypeKind::DriftReversal;
    athetosis.period_s = 4.0;
    athetosis.amp_px = 30.0;
    athetosis.targets = {Landmark::RightAnkle};
    athetosis.label_bits[static_cast<int>(Phenotype::Athetosis)] = 1;

    for (int i = 0; i < n_patients; ++i) {
        SubjectSpec s;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "patient_%02d", i);
        s.subject_id = buf;
        switch (i % 5) {
            case 0: s.archetypes = {tremor}; break;
            case 1: s.archetypes = {myoclonus}; break;
            case 2: s.archetypes = {athetosis}; break;
            case 3: s.archetypes = {tremor, myoclonus}; break;
            case 4: s.archetypes = {myoclonus, athetosis}; break;
        }
        cohort.subjects.push_back(std::move(s));
    }
    for (int i = 0; i < n_controls; ++i) {
        SubjectSpec s;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "control_%02d", i);
        s.subject_id = buf;
        s.is_control = true;
        cohort.subjects.push_back(std::move(s));
    }
    return cohort;
}

}  // namespace kinephen
