#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinephen/calibrate.hpp"
#include "kinephen/core.hpp"
#include "kinephen/errors.hpp"
#include "kinephen/feature_select.hpp"
#include "kinephen/models.hpp"
#include "kinephen/scalers.hpp"

namespace kinephen {

enum class ModelKindTag : int { LogReg = 0, Knn, BaggedTrees };
enum class CalibrationKind : int { None = 0, Platt };

struct ModelSpec {
    ModelKindTag kind = ModelKindTag::LogReg;
    double c = 1.0;                      // logreg
    int k = 5;                           // knn
    double p = 2.0;                      // knn Minkowski power
    bool distance_weighted = false;      // knn
    int n_trees = 100;                   // trees
    int max_depth = 0;                   // trees, 0 = unlimited
    FeatureSubsample subsample = FeatureSubsample::Sqrt;

    std::string name() const {
        switch (kind) {
            case ModelKindTag::LogReg: return "logreg(C=" + format_num(c) + ")";
            case ModelKindTag::Knn:
                return "knn(k=" + std::to_string(k) + ",p=" + format_num(p) +
                       ",w=" + (distance_weighted ? "distance" : "uniform") + ")";
            case ModelKindTag::BaggedTrees:
                return "bagged_trees(n=" + std::to_string(n_trees) +
                       ",depth=" + std::to_string(max_depth) +
                       ",fs=" + (subsample == FeatureSubsample::Sqrt ? "sqrt" : "all") + ")";
        }
        return "?";
    }

  private:
    static std::string format_num(double v) {
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }
};

struct PipelineSpec {
    ScalerKind scaler = ScalerKind::Standard;
    std::optional<int> selector_k;  // SelectKBest by mutual information
    ModelSpec model;
    CalibrationKind calibration = CalibrationKind::None;
    bool class_weight_balanced = false;

    std::string name() const {
        std::string s(scaler_name(scaler));
        if (selector_k) s += "+mi" + std::to_string(*selector_k);
        s += "+" + model.name();
        if (calibration == CalibrationKind::Platt) s += "+platt";
        if (class_weight_balanced) s += "+balanced";
        return s;
    }
};

inline std::unique_ptr<Classifier> make_model(const ModelSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case ModelKindTag::LogReg:
            return std::make_unique<LogisticRegressionModel>(spec.c);
        case ModelKindTag::Knn:
            return std::make_unique<KnnModel>(spec.k, spec.p, spec.distance_weighted);
        case ModelKindTag::BaggedTrees:
            return std::make_unique<BaggedTreesModel>(spec.n_trees, spec.max_depth, spec.subsample,
                                                      seed);
    }
    throw InternalError("unknown model kind");
}

// A fitted scaler -> selector -> model -> calibration chain. No statistic in
// here ever saw a test row.
struct FittedPipeline {
    PipelineSpec spec;
    FittedScaler scaler;
    std::vector<int> selected;  // ascending column indices; empty = identity
    std::unique_ptr<Classifier> model;
    PlattSigmoid calibration;  // identity unless Platt was requested and feasible
    bool calibration_requested = false;

    std::vector<double> preprocess(std::span<const double> raw) const {
        std::vector<double> scaled(raw.size());
        scaler.transform_row(raw, scaled);
        if (selected.empty()) return scaled;
        std::vector<double> out(selected.size());
        for (std::size_t i = 0; i < selected.size(); ++i) out[i] = scaled[selected[i]];
        return out;
    }

    double probability(std::span<const double> raw_row) const {
        const auto row = preprocess(raw_row);
        if (calibration_requested) return calibration(model->raw_score(row));
        return model->probability(row);
    }
};

inline FittedPipeline fit_pipeline(const PipelineSpec& spec, const Matrix& train_raw,
                                   const std::vector<std::uint8_t>& y, std::uint64_t seed) {
    FittedPipeline fp;
    fp.spec = spec;
    fp.scaler = fit_scaler(spec.scaler, train_raw);
    Matrix scaled = apply_scaler(fp.scaler, train_raw);
    if (spec.selector_k) {
        fp.selected = select_k_best_mi(scaled, y, *spec.selector_k);
        scaled = select_columns(scaled, fp.selected);
    }
    const auto weights = spec.class_weight_balanced ? balanced_weights(y)
                                                    : std::vector<double>(y.size(), 1.0);
    fp.model = make_model(spec.model, seed);
    if (spec.calibration == CalibrationKind::Platt) {
        fp.calibration_requested = true;
        fp.calibration = platt_calibrate(*fp.model, scaled, y, weights, seed);
    }
    fp.model->fit(scaled, y, weights);
    return fp;
}

// Exhaustive search over an enumerated spec list: per-spec scores are the
// mean of fold scores produced by `fold_score`; ties keep the earlier spec
// (the enumeration order is the lexicographic spec order).
struct GridResult {
    int best_index = -1;
    std::vector<double> mean_scores;
};

inline GridResult grid_search(const std::vector<PipelineSpec>& grid, int n_folds,
                              const std::function<double(const PipelineSpec&, int)>& fold_score,
                              bool higher_is_better = true) {
    if (grid.empty()) throw InputError("empty pipeline grid");
    GridResult res;
    res.mean_scores.resize(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0;
        int used = 0;
        for (int f = 0; f < n_folds; ++f) {
            const double s = fold_score(grid[g], f);
            if (std::isnan(s)) continue;  // fold skipped (single-class)
            acc += s;
            ++used;
        }
        res.mean_scores[g] = used > 0 ? acc / used : std::numeric_limits<double>::quiet_NaN();
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (std::isnan(res.mean_scores[g])) continue;
        if (res.best_index < 0) {
            res.best_index = static_cast<int>(g);
            continue;
        }
        const double cur = res.mean_scores[g], best = res.mean_scores[res.best_index];
        if (higher_is_better ? cur > best : cur < best) res.best_index = static_cast<int>(g);
    }
    if (res.best_index < 0) throw DegenerateDataset("no grid configuration produced a score");
    return res;
}

}  // namespace kinephen
