#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/models.hpp"

namespace kinephen {

// Sigmoid map p = sigma(a * score + b). The identity fallback (a=1, b=0) is
// used whenever fitting is infeasible.
struct PlattSigmoid {
    double a = 1.0;
    double b = 0.0;
    bool fitted = false;

    double operator()(double score) const { return sigmoid(a * score + b); }
};

// Platt's regularized maximum-likelihood fit: targets are smoothed to
// (n+ + 1)/(n+ + 2) and 1/(n- + 2), optimized by Newton in (a, b).
inline PlattSigmoid platt_fit(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& y) {
    PlattSigmoid out;
    double n_pos = 0, n_neg = 0;
    for (auto v : y) (v ? n_pos : n_neg) += 1.0;
    if (n_pos == 0 || n_neg == 0 || scores.size() != y.size()) return out;
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);

    double a = 1.0, b = std::log((n_neg + 1.0) / (n_pos + 1.0)) * -1.0;
    auto loss = [&](double aa, double bb) {
        double l = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double t = y[i] ? t_pos : t_neg;
            const double z = aa * scores[i] + bb;
            const double soft = z > 30 ? z : std::log1p(std::exp(z));
            l += soft - t * z;
        }
        return l;
    };
    double cur = loss(a, b);
    for (int iter = 0; iter < 200; ++iter) {
        double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double t = y[i] ? t_pos : t_neg;
            const double p = sigmoid(a * scores[i] + b);
            const double e = p - t;
            const double w = std::max(p * (1.0 - p), 1e-12);
            ga += e * scores[i];
            gb += e;
            haa += w * scores[i] * scores[i];
            hab += w * scores[i];
            hbb += w;
        }
        if (std::max(std::abs(ga), std::abs(gb)) < 1e-9) break;
        const double det = haa * hbb - hab * hab;
        double da, db;
        if (std::abs(det) < 1e-12) {
            da = -ga * 1e-3;
            db = -gb * 1e-3;
        } else {
            da = -(hbb * ga - hab * gb) / det;
            db = -(haa * gb - hab * ga) / det;
        }
        double step = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 30; ++ls) {
            const double na = a + step * da, nb = b + step * db;
            const double l = loss(na, nb);
            if (l <= cur + 1e-14) {
                a = na;
                b = nb;
                cur = l;
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) break;
    }
    out.a = a;
    out.b = b;
    out.fitted = true;
    return out;
}

namespace detail {

// Class-stratified assignment of rows to `k` internal calibration folds.
inline std::vector<int> stratified_fold_ids(const std::vector<std::uint8_t>& y, int k,
                                            std::uint64_t seed) {
    std::vector<int> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(static_cast<int>(i));
    auto rng = make_rng(mix_seed(seed, 0xca1b));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<int> ids(y.size(), 0);
    for (std::size_t i = 0; i < pos.size(); ++i) ids[pos[i]] = static_cast<int>(i % k);
    for (std::size_t i = 0; i < neg.size(); ++i) ids[neg[i]] = static_cast<int>(i % k);
    return ids;
}

}  // namespace detail

// Fits the Platt sigmoid on out-of-fold raw scores from a 3-fold internal
// split of the training rows. Falls back to the identity sigmoid when the
// training partition is too small to calibrate (fewer than 6 rows, or fewer
// than 3 rows in either class).
inline PlattSigmoid platt_calibrate(const Classifier& prototype, const Matrix& x,
                                    const std::vector<std::uint8_t>& y,
                                    const std::vector<double>& sample_weight, std::uint64_t seed) {
    constexpr int kFolds = 3;
    double n_pos = 0;
    for (auto v : y) n_pos += v;
    const double n_neg = static_cast<double>(y.size()) - n_pos;
    if (y.size() < 6 || n_pos < kFolds || n_neg < kFolds) return {};  // identity fallback

    const auto fold_ids = detail::stratified_fold_ids(y, kFolds, seed);
    std::vector<double> oof_scores;
    std::vector<std::uint8_t> oof_y;
    for (int f = 0; f < kFolds; ++f) {
        std::vector<int> train_rows, held_rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            (fold_ids[i] == f ? held_rows : train_rows).push_back(static_cast<int>(i));
        Matrix xt(train_rows.size(), x.cols);
        std::vector<std::uint8_t> yt(train_rows.size());
        std::vector<double> wt(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            const auto src = x.row(train_rows[i]);
            std::copy(src.begin(), src.end(), xt.row(i).begin());
            yt[i] = y[train_rows[i]];
            wt[i] = sample_weight[train_rows[i]];
        }
        auto model = prototype.clone_unfitted();
        model->fit(xt, yt, wt);
        for (int r : held_rows) {
            oof_scores.push_back(model->raw_score(x.row(r)));
            oof_y.push_back(y[r]);
        }
    }
    auto sig = platt_fit(oof_scores, oof_y);
    if (!sig.fitted) return {};
    return sig;
}

}  // namespace kinephen
