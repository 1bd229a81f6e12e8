#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinephen/core.hpp"
#include "kinephen/errors.hpp"
#include "kinephen/linalg.hpp"

namespace kinephen {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Common probabilistic binary classifier surface. raw_score is a monotone
// evidence value used by Platt calibration; probability is the model's own
// estimate in [0,1].
class Classifier {
  public:
    virtual ~Classifier() = default;
    virtual void fit(const Matrix& x, const std::vector<std::uint8_t>& y,
                     const std::vector<double>& sample_weight) = 0;
    virtual double raw_score(std::span<const double> row) const = 0;
    virtual double probability(std::span<const double> row) const = 0;
    virtual nlohmann::ordered_json params() const = 0;
    virtual std::unique_ptr<Classifier> clone_unfitted() const = 0;
};

inline std::vector<double> balanced_weights(const std::vector<std::uint8_t>& y) {
    double n1 = 0;
    for (auto v : y) n1 += v ? 1 : 0;
    const double n0 = static_cast<double>(y.size()) - n1;
    std::vector<double> w(y.size(), 1.0);
    if (n0 == 0 || n1 == 0) return w;
    const double n = static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] ? n / (2.0 * n1) : n / (2.0 * n0);
    return w;
}

// ---------------------------------------------------------------------------
// L2-penalized logistic regression, Newton iterations with backtracking.
// Objective (weights s_i, S = sum s_i):
//   J(w,b) = ||w||^2 / (2 C S) + (1/S) sum_i s_i [log(1+e^{z_i}) - y_i z_i]
// Converged when the gradient max-norm drops below 1e-6 (up to 1000 steps).
// ---------------------------------------------------------------------------
class LogisticRegressionModel final : public Classifier {
  public:
    explicit LogisticRegressionModel(double c = 1.0) : c_(c) {}

    void fit(const Matrix& x, const std::vector<std::uint8_t>& y,
             const std::vector<double>& sw) override {
        const std::size_t n = x.rows, d = x.cols;
        double n_pos = 0;
        for (auto v : y) n_pos += v;
        if (n_pos == 0 || n_pos == static_cast<double>(n))
            throw DegenerateDataset("logistic regression requires both classes");
        double s_total = 0;
        for (double w : sw) s_total += w;
        const double lambda = 1.0 / (c_ * s_total);

        weights_.assign(d, 0.0);
        bias_ = 0.0;
        std::vector<double> z(n, 0.0), p(n, 0.5), grad(d + 1, 0.0);
        converged_ = false;

        auto objective = [&] {
            double j = 0;
            for (std::size_t i = 0; i < n; ++i) {
                // log(1+e^z) - y z, computed stably
                const double zi = z[i];
                const double soft = zi > 30 ? zi : std::log1p(std::exp(zi));
                j += sw[i] * (soft - (y[i] ? zi : 0.0));
            }
            j /= s_total;
            for (double w : weights_) j += 0.5 * lambda * w * w;
            return j;
        };

        auto recompute_z = [&] {
            for (std::size_t i = 0; i < n; ++i) {
                double zi = bias_;
                const auto row = x.row(i);
                for (std::size_t c = 0; c < d; ++c) zi += weights_[c] * row[c];
                z[i] = zi;
                p[i] = sigmoid(zi);
            }
        };
        recompute_z();
        double j_cur = objective();

        for (int iter = 0; iter < 1000; ++iter) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double g = sw[i] * (p[i] - (y[i] ? 1.0 : 0.0)) / s_total;
                const auto row = x.row(i);
                for (std::size_t c = 0; c < d; ++c) grad[c] += g * row[c];
                grad[d] += g;
            }
            for (std::size_t c = 0; c < d; ++c) grad[c] += lambda * weights_[c];
            double gmax = 0;
            for (double g : grad) gmax = std::max(gmax, std::abs(g));
            if (gmax < 1e-6) {
                converged_ = true;
                break;
            }
            // Hessian over [w; b]
            const std::size_t m = d + 1;
            std::vector<double> h(m * m, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double wgt = sw[i] * p[i] * (1.0 - p[i]) / s_total;
                if (wgt <= 0) continue;
                const auto row = x.row(i);
                for (std::size_t a = 0; a < d; ++a) {
                    const double ra = wgt * row[a];
                    for (std::size_t b = a; b < d; ++b) h[a * m + b] += ra * row[b];
                    h[a * m + d] += ra;
                }
                h[d * m + d] += wgt;
            }
            for (std::size_t a = 0; a < d; ++a) h[a * m + a] += lambda;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < a; ++b) h[a * m + b] = h[b * m + a];

            std::vector<double> neg_grad(m);
            for (std::size_t a = 0; a < m; ++a) neg_grad[a] = -grad[a];
            const auto step = cholesky_solve(std::move(h), std::move(neg_grad), m);

            double t = 1.0;
            const auto w_old = weights_;
            const double b_old = bias_;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t c = 0; c < d; ++c) weights_[c] = w_old[c] + t * step[c];
                bias_ = b_old + t * step[d];
                recompute_z();
                const double j_new = objective();
                if (j_new <= j_cur + 1e-14) {
                    j_cur = j_new;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                weights_ = w_old;
                bias_ = b_old;
                recompute_z();
                break;
            }
        }
    }

    double raw_score(std::span<const double> row) const override {
        double z = bias_;
        for (std::size_t c = 0; c < row.size(); ++c) z += weights_[c] * row[c];
        return z;
    }

    double probability(std::span<const double> row) const override {
        return sigmoid(raw_score(row));
    }

    nlohmann::ordered_json params() const override {
        nlohmann::ordered_json j;
        j["kind"] = "logreg";
        j["C"] = c_;
        j["converged"] = converged_;
        j["bias"] = bias_;
        j["weights"] = weights_;
        return j;
    }

    std::unique_ptr<Classifier> clone_unfitted() const override {
        return std::make_unique<LogisticRegressionModel>(c_);
    }

    bool converged() const { return converged_; }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double>& mutable_weights() { return weights_; }
    double bias() const { return bias_; }

  private:
    double c_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    bool converged_ = false;
};

// ---------------------------------------------------------------------------
// k-nearest neighbors with Minkowski-p distance. Probability is the positive
// fraction among the k nearest; distance ties resolve by training row order.
// ---------------------------------------------------------------------------
class KnnModel final : public Classifier {
  public:
    KnnModel(int k = 5, double p = 2.0, bool distance_weighted = false)
        : k_(k), p_(p), distance_weighted_(distance_weighted) {}

    void fit(const Matrix& x, const std::vector<std::uint8_t>& y,
             const std::vector<double>&) override {
        if (static_cast<int>(x.rows) < k_)
            throw DegenerateDataset("knn needs at least k=" + std::to_string(k_) + " rows");
        train_ = x;
        y_ = y;
    }

    double raw_score(std::span<const double> row) const override { return probability(row); }

    double probability(std::span<const double> row) const override {
        std::vector<std::pair<double, int>> dist(train_.rows);
        for (std::size_t i = 0; i < train_.rows; ++i) {
            const auto tr = train_.row(i);
            double acc = 0;
            for (std::size_t c = 0; c < tr.size(); ++c) acc += std::pow(std::abs(row[c] - tr[c]), p_);
            dist[i] = {std::pow(acc, 1.0 / p_), static_cast<int>(i)};
        }
        std::sort(dist.begin(), dist.end());
        double num = 0, den = 0;
        for (int i = 0; i < k_; ++i) {
            const auto [d, idx] = dist[i];
            if (distance_weighted_) {
                if (d <= 0) return y_[idx] ? 1.0 : 0.0;  // exact match dominates
                num += (y_[idx] ? 1.0 : 0.0) / d;
                den += 1.0 / d;
            } else {
                num += y_[idx] ? 1.0 : 0.0;
                den += 1.0;
            }
        }
        return num / den;
    }

    nlohmann::ordered_json params() const override {
        nlohmann::ordered_json j;
        j["kind"] = "knn";
        j["k"] = k_;
        j["p"] = p_;
        j["weights"] = distance_weighted_ ? "distance" : "uniform";
        return j;
    }

    std::unique_ptr<Classifier> clone_unfitted() const override {
        return std::make_unique<KnnModel>(k_, p_, distance_weighted_);
    }

  private:
    int k_;
    double p_;
    bool distance_weighted_;
    Matrix train_;
    std::vector<std::uint8_t> y_;
};

// ---------------------------------------------------------------------------
// Bagged CART trees: bootstrap samples, Gini splits, sqrt-or-all feature
// subsampling per split. Ensemble probability is the mean of leaf positive
// fractions. Fully deterministic for a given seed.
// ---------------------------------------------------------------------------
enum class FeatureSubsample : int { Sqrt = 0, All };

class BaggedTreesModel final : public Classifier {
  public:
    BaggedTreesModel(int n_trees = 100, int max_depth = 0,
                     FeatureSubsample subsample = FeatureSubsample::Sqrt, std::uint64_t seed = 0)
        : n_trees_(n_trees), max_depth_(max_depth), subsample_(subsample), seed_(seed) {}

    void fit(const Matrix& x, const std::vector<std::uint8_t>& y,
             const std::vector<double>&) override {
        double n_pos = 0;
        for (auto v : y) n_pos += v;
        if (n_pos == 0 || n_pos == static_cast<double>(y.size()))
            throw DegenerateDataset("bagged trees require both classes");
        trees_.clear();
        trees_.resize(n_trees_);
        n_features_ = x.cols;
        for (int t = 0; t < n_trees_; ++t) {
            auto rng = make_rng(mix_seed(seed_, 0x7ee5, static_cast<std::uint64_t>(t)));
            std::vector<int> sample(x.rows);
            std::uniform_int_distribution<std::size_t> pick(0, x.rows - 1);
            for (auto& s : sample) s = static_cast<int>(pick(rng));
            build_node(trees_[t], x, y, sample, 0, rng);
        }
    }

    double raw_score(std::span<const double> row) const override { return probability(row); }

    double probability(std::span<const double> row) const override {
        double acc = 0;
        for (const auto& tree : trees_) acc += tree_probability(tree, row);
        return acc / static_cast<double>(trees_.size());
    }

    std::vector<double> tree_probabilities(std::span<const double> row) const {
        std::vector<double> out;
        out.reserve(trees_.size());
        for (const auto& tree : trees_) out.push_back(tree_probability(tree, row));
        return out;
    }

    nlohmann::ordered_json params() const override {
        nlohmann::ordered_json j;
        j["kind"] = "bagged_trees";
        j["n_trees"] = n_trees_;
        j["max_depth"] = max_depth_;
        j["feature_subsample"] = subsample_ == FeatureSubsample::Sqrt ? "sqrt" : "all";
        j["seed"] = seed_;
        return j;
    }

    std::unique_ptr<Classifier> clone_unfitted() const override {
        return std::make_unique<BaggedTreesModel>(n_trees_, max_depth_, subsample_, seed_);
    }

  private:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0;
        int left = -1, right = -1;
        double prob = 0;
    };
    using Tree = std::vector<Node>;

    int build_node(Tree& tree, const Matrix& x, const std::vector<std::uint8_t>& y,
                   const std::vector<int>& rows, int depth, std::mt19937_64& rng) {
        const int node_id = static_cast<int>(tree.size());
        tree.push_back({});
        double pos = 0;
        for (int r : rows) pos += y[r];
        const double n = static_cast<double>(rows.size());
        tree[node_id].prob = pos / n;

        const bool pure = pos == 0 || pos == n;
        const bool depth_capped = max_depth_ > 0 && depth >= max_depth_;
        if (pure || depth_capped || rows.size() < 2) return node_id;

        std::vector<int> candidates(n_features_);
        std::iota(candidates.begin(), candidates.end(), 0);
        if (subsample_ == FeatureSubsample::Sqrt) {
            std::shuffle(candidates.begin(), candidates.end(), rng);
            candidates.resize(std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features_))))));
            std::sort(candidates.begin(), candidates.end());
        }

        int best_feature = -1;
        double best_threshold = 0, best_impurity = gini(pos, n);
        std::vector<std::pair<double, int>> vals;
        for (int f : candidates) {
            vals.clear();
            for (int r : rows) vals.emplace_back(x.at(r, f), r);
            std::sort(vals.begin(), vals.end());
            double left_pos = 0, left_n = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                left_pos += y[vals[i].second];
                left_n += 1;
                if (vals[i].first == vals[i + 1].first) continue;
                const double right_n = n - left_n;
                const double right_pos = pos - left_pos;
                const double imp =
                    (left_n / n) * gini(left_pos, left_n) + (right_n / n) * gini(right_pos, right_n);
                if (imp < best_impurity - 1e-12) {
                    best_impurity = imp;
                    best_feature = f;
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_feature < 0) return node_id;  // no informative split among candidates

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (x.at(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        if (left_rows.empty() || right_rows.empty()) return node_id;

        tree[node_id].feature = best_feature;
        tree[node_id].threshold = best_threshold;
        tree[node_id].left = build_node(tree, x, y, left_rows, depth + 1, rng);
        tree[node_id].right = build_node(tree, x, y, right_rows, depth + 1, rng);
        return node_id;
    }

    static double gini(double pos, double n) {
        if (n <= 0) return 0;
        const double p = pos / n;
        return 2.0 * p * (1.0 - p);
    }

    static double tree_probability(const Tree& tree, std::span<const double> row) {
        int node = 0;
        while (tree[node].feature >= 0)
            node = row[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                                   : tree[node].right;
        return tree[node].prob;
    }

    int n_trees_;
    int max_depth_;
    FeatureSubsample subsample_;
    std::uint64_t seed_;
    std::size_t n_features_ = 0;
    std::vector<Tree> trees_;
};

}  // namespace kinephen
