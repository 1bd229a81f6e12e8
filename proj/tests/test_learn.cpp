#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kinephen/calibrate.hpp"
#include "kinephen/feature_select.hpp"
#include "kinephen/models.hpp"
#include "kinephen/pipeline.hpp"
#include "kinephen/scalers.hpp"

using namespace kinephen;
using Catch::Approx;

namespace {

Matrix column_matrix(const std::vector<double>& col) {
    Matrix m(col.size(), 1);
    for (std::size_t i = 0; i < col.size(); ++i) m.at(i, 0) = col[i];
    return m;
}

// test-side Yeo-Johnson lambda by dense grid search
double yj_lambda_grid(const std::vector<double>& col) {
    auto ll = [&](double lam) {
        std::vector<double> t(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) t[i] = yeo_johnson(col[i], lam);
        double m = 0;
        for (double v : t) m += v;
        m /= t.size();
        double var = 0;
        for (double v : t) var += (v - m) * (v - m);
        var /= t.size();
        if (var <= 0) return -1e300;
        double acc = -0.5 * col.size() * std::log(var);
        for (double x : col) acc += (lam - 1.0) * (x >= 0 ? std::log1p(x) : -std::log1p(-x));
        return acc;
    };
    double best = -5, best_ll = ll(-5);
    for (double lam = -5; lam <= 5; lam += 1e-3) {
        const double v = ll(lam);
        if (v > best_ll) {
            best_ll = v;
            best = lam;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("Standard scaler uses the population sigma") {
    const auto m = column_matrix({1, 2, 3});
    const auto s = fit_scaler(ScalerKind::Standard, m);
    const auto out = apply_scaler(s, m);
    CHECK(out.at(0, 0) == Approx(-1.2247448714).margin(1e-6));
    CHECK(out.at(1, 0) == Approx(0.0).margin(1e-12));
    CHECK(out.at(2, 0) == Approx(1.2247448714).margin(1e-6));
}

TEST_CASE("MinMax on a constant column degenerates to zero") {
    const auto m = column_matrix({2, 2, 2});
    const auto out = apply_scaler(fit_scaler(ScalerKind::MinMax, m), m);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.at(i, 0) == 0.0);
}

TEST_CASE("Robust scaler centers on the median and divides by the IQR") {
    const auto m = column_matrix({1, 2, 3, 4, 100});
    const auto out = apply_scaler(fit_scaler(ScalerKind::Robust, m), m);
    CHECK(out.at(0, 0) == Approx(-1.0));
    CHECK(out.at(1, 0) == Approx(-0.5));
    CHECK(out.at(2, 0) == Approx(0.0));
    CHECK(out.at(3, 0) == Approx(0.5));
    CHECK(out.at(4, 0) == Approx(48.5));
}

TEST_CASE("Yeo-Johnson matches a dense-grid maximum-likelihood oracle") {
    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> skewed(0.0, 0.8);
    std::vector<double> col(200);
    for (auto& v : col) v = skewed(rng) - 0.5;  // includes negatives
    const auto m = column_matrix(col);
    const auto s = fit_scaler(ScalerKind::PowerYJ, m);
    const double lam_oracle = yj_lambda_grid(col);
    CHECK(s.lambda[0] == Approx(lam_oracle).margin(2e-3));

    // transformed outputs agree with an oracle-normalized transform to 1e-6
    std::vector<double> t(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) t[i] = yeo_johnson(col[i], s.lambda[0]);
    double mean = 0;
    for (double v : t) mean += v;
    mean /= t.size();
    double var = 0;
    for (double v : t) var += (v - mean) * (v - mean);
    var /= t.size();
    const auto out = apply_scaler(s, m);
    for (std::size_t i = 0; i < col.size(); ++i)
        CHECK(out.at(i, 0) == Approx((t[i] - mean) / std::sqrt(var)).epsilon(1e-6));

    // transform is monotone
    const auto a = s.transform_value(0, 0.3);
    const auto b = s.transform_value(0, 0.7);
    CHECK(a < b);
}

TEST_CASE("select_k_best_mi ranks a perfect predictor first") {
    std::mt19937_64 rng(10);
    const std::size_t n = 400;
    Matrix m(n, 3);
    std::vector<std::uint8_t> y(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = unit(rng) < 0.4 ? 1 : 0;
        m.at(i, 0) = unit(rng);                  // independent noise
        m.at(i, 1) = y[i] ? 1.0 : 0.0;           // identical to y
        m.at(i, 2) = unit(rng) * 0.1 + 0.5;      // more noise
    }
    const auto top1 = select_k_best_mi(m, y, 1);
    REQUIRE(top1 == std::vector<int>{1});

    std::vector<double> ycol(n), noise(n);
    for (std::size_t i = 0; i < n; ++i) {
        ycol[i] = m.at(i, 1);
        noise[i] = m.at(i, 0);
    }
    const double h_y = [&] {
        double p = 0;
        for (auto v : y) p += v;
        p /= n;
        return -(p * std::log(p) + (1 - p) * std::log(1 - p));
    }();
    CHECK(mutual_information_binned(ycol, y) == Approx(h_y).margin(1e-9));
    CHECK(mutual_information_binned(noise, y) < 0.05);  // estimator bias only

    const auto all = select_k_best_mi(m, y, 3);
    CHECK(all == std::vector<int>{0, 1, 2});
}

TEST_CASE("logistic regression basics") {
    SECTION("separable two-point problem") {
        // at x = -5/+5 the penalized optimum is w ~ 0.563, p(5) ~ 0.944
        Matrix x(2, 1);
        x.at(0, 0) = -5.0;
        x.at(1, 0) = 5.0;
        LogisticRegressionModel lr(1.0);
        lr.fit(x, {0, 1}, {1.0, 1.0});
        CHECK(lr.probability(x.row(0)) < 0.1);
        CHECK(lr.probability(x.row(1)) > 0.9);
    }
    SECTION("identical features yield zero weights and the class prior") {
        Matrix x(10, 2);
        std::vector<std::uint8_t> y;
        for (int i = 0; i < 10; ++i) {
            x.at(i, 0) = 3.0;
            x.at(i, 1) = -1.0;
            y.push_back(i < 7 ? 1 : 0);
        }
        LogisticRegressionModel lr(1.0);
        lr.fit(x, y, std::vector<double>(10, 1.0));
        CHECK(std::abs(lr.weights()[0]) < 1e-5);
        CHECK(std::abs(lr.weights()[1]) < 1e-5);
        CHECK(lr.probability(x.row(0)) == Approx(0.7).margin(1e-3));
    }
    SECTION("balanced weights recenter the mean prediction") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> noise(0.0, 1.0);
        const int n = 200;
        Matrix x(n, 1);
        std::vector<std::uint8_t> y(n);
        for (int i = 0; i < n; ++i) {
            y[i] = i < 20 ? 1 : 0;  // 10% positive
            x.at(i, 0) = noise(rng) + (y[i] ? 0.5 : 0.0);
        }
        LogisticRegressionModel lr(1.0);
        lr.fit(x, y, balanced_weights(y));
        double mean_p = 0;
        for (int i = 0; i < n; ++i) mean_p += lr.probability(x.row(i));
        mean_p /= n;
        CHECK(mean_p == Approx(0.5).margin(0.08));
    }
    SECTION("gradient at the optimum vanishes (finite differences)") {
        std::mt19937_64 rng(8);
        std::normal_distribution<double> noise(0.0, 1.0);
        const int n = 60;
        const double c = 2.0;
        Matrix x(n, 3);
        std::vector<std::uint8_t> y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < 3; ++j) x.at(i, j) = noise(rng);
            y[i] = x.at(i, 0) + 0.5 * noise(rng) > 0 ? 1 : 0;
        }
        LogisticRegressionModel lr(c);
        lr.fit(x, y, std::vector<double>(n, 1.0));
        REQUIRE(lr.converged());

        // objective as documented: ||w||^2/(2 C S) + (1/S) sum log-loss
        auto objective = [&](const std::vector<double>& w, double b) {
            const double s_total = n;
            double j = 0;
            for (int i = 0; i < n; ++i) {
                double z = b;
                for (int col = 0; col < 3; ++col) z += w[col] * x.at(i, col);
                j += std::log1p(std::exp(z)) - (y[i] ? z : 0.0);
            }
            j /= s_total;
            for (double v : w) j += v * v / (2.0 * c * s_total);
            return j;
        };
        const auto w0 = lr.weights();
        const double b0 = lr.bias();
        const double h = 1e-6;
        for (int j = 0; j < 3; ++j) {
            auto wp = w0, wm = w0;
            wp[j] += h;
            wm[j] -= h;
            const double g = (objective(wp, b0) - objective(wm, b0)) / (2 * h);
            CHECK(std::abs(g) < 1e-4);
        }
        const double gb = (objective(w0, b0 + h) - objective(w0, b0 - h)) / (2 * h);
        CHECK(std::abs(gb) < 1e-4);
    }
}

TEST_CASE("knn probability is the positive fraction among neighbors") {
    Matrix x(4, 1);
    x.at(0, 0) = 0.0;
    x.at(1, 0) = 1.0;
    x.at(2, 0) = 2.0;
    x.at(3, 0) = 10.0;
    const std::vector<std::uint8_t> y{1, 1, 0, 0};

    SECTION("query equal to a training row with k=1") {
        KnnModel knn(1);
        knn.fit(x, y, {});
        CHECK(knn.probability(x.row(0)) == 1.0);
        CHECK(knn.probability(x.row(3)) == 0.0);
    }
    SECTION("k equal to the number of rows gives the prior") {
        KnnModel knn(4);
        knn.fit(x, y, {});
        CHECK(knn.probability(std::vector<double>{5.0}) == Approx(0.5));
    }
    SECTION("three nearest of labels {1,1,0}") {
        KnnModel knn(3);
        knn.fit(x, y, {});
        CHECK(knn.probability(std::vector<double>{0.9}) == Approx(2.0 / 3.0));
    }
}

TEST_CASE("bagged trees") {
    SECTION("a single deep tree separates XOR") {
        Matrix x(4, 2);
        const double pts[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        for (int i = 0; i < 4; ++i) {
            x.at(i, 0) = pts[i][0];
            x.at(i, 1) = pts[i][1];
        }
        const std::vector<std::uint8_t> y{0, 1, 1, 0};
        // bootstrap would break the 4-point XOR; use many trees so every
        // region is covered, with all features available per split
        BaggedTreesModel trees(200, 0, FeatureSubsample::All, 5);
        trees.fit(x, y, {});
        for (int i = 0; i < 4; ++i) {
            const double p = trees.probability(x.row(i));
            CHECK((p > 0.5) == (y[i] == 1));
        }
    }
    SECTION("constant features predict the prior everywhere") {
        Matrix x(10, 2);
        std::vector<std::uint8_t> y;
        for (int i = 0; i < 10; ++i) {
            x.at(i, 0) = 1.0;
            x.at(i, 1) = 2.0;
            y.push_back(i < 3 ? 1 : 0);
        }
        BaggedTreesModel trees(100, 0, FeatureSubsample::All, 1);
        trees.fit(x, y, {});
        // each tree's root is a leaf holding its bootstrap prior; the
        // ensemble concentrates around 0.3
        CHECK(trees.probability(x.row(0)) == Approx(0.3).margin(0.1));
    }
    SECTION("ensemble probability is the mean of per-tree probabilities") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> noise(0.0, 1.0);
        Matrix x(50, 3);
        std::vector<std::uint8_t> y(50);
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 3; ++j) x.at(i, j) = noise(rng);
            y[i] = x.at(i, 1) > 0 ? 1 : 0;
        }
        BaggedTreesModel trees(25, 4, FeatureSubsample::Sqrt, 9);
        trees.fit(x, y, {});
        const auto per_tree = trees.tree_probabilities(x.row(7));
        double mean = 0;
        for (double p : per_tree) mean += p;
        mean /= per_tree.size();
        CHECK(trees.probability(x.row(7)) == Approx(mean).epsilon(1e-12));
    }
    SECTION("determinism per seed, stability across seeds") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> noise(0.0, 1.0);
        Matrix x(120, 4);
        std::vector<std::uint8_t> y(120);
        for (int i = 0; i < 120; ++i) {
            for (int j = 0; j < 4; ++j) x.at(i, j) = noise(rng);
            y[i] = x.at(i, 0) + 0.3 * noise(rng) > 0 ? 1 : 0;
        }
        BaggedTreesModel a(300, 0, FeatureSubsample::Sqrt, 11), a2(300, 0, FeatureSubsample::Sqrt, 11);
        BaggedTreesModel b(300, 0, FeatureSubsample::Sqrt, 12);
        a.fit(x, y, {});
        a2.fit(x, y, {});
        b.fit(x, y, {});
        double diff = 0;
        for (int i = 0; i < 120; ++i) {
            CHECK(a.probability(x.row(i)) == a2.probability(x.row(i)));
            diff += std::abs(a.probability(x.row(i)) - b.probability(x.row(i)));
        }
        CHECK(diff / 120.0 < 0.1);
    }
}

TEST_CASE("platt scaling") {
    SECTION("already-calibrated logit scores recover a ~ 1") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> score_dist(0.0, 2.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> scores(3000);
        std::vector<std::uint8_t> y(3000);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            scores[i] = score_dist(rng);
            y[i] = unit(rng) < sigmoid(scores[i]) ? 1 : 0;
        }
        const auto sig = platt_fit(scores, y);
        REQUIRE(sig.fitted);
        CHECK(sig.a == Approx(1.0).margin(0.3));
        CHECK(sig.b == Approx(0.0).margin(0.3));
    }
    SECTION("single-class calibration partitions fall back to identity") {
        Matrix x(3, 1);
        for (int i = 0; i < 3; ++i) x.at(i, 0) = i;
        LogisticRegressionModel proto(1.0);
        const auto sig = platt_calibrate(proto, x, {1, 1, 1}, {1, 1, 1}, 42);
        CHECK_FALSE(sig.fitted);
        CHECK(sig.a == 1.0);
        CHECK(sig.b == 0.0);
    }
    SECTION("calibrated probability is nondecreasing in the raw score") {
        std::mt19937_64 rng(21);
        std::normal_distribution<double> score_dist(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> scores(500);
        std::vector<std::uint8_t> y(500);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            scores[i] = score_dist(rng);
            y[i] = unit(rng) < sigmoid(2.0 * scores[i]) ? 1 : 0;
        }
        const auto sig = platt_fit(scores, y);
        REQUIRE(sig.fitted);
        for (double s = -3.0; s < 3.0; s += 0.25) CHECK(sig(s) <= sig(s + 0.25) + 1e-12);
    }
}

TEST_CASE("pipeline fit keeps probabilities in [0,1] for every model") {
    std::mt19937_64 rng(30);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 80;
    Matrix x(n, 5);
    std::vector<std::uint8_t> y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 5; ++j) x.at(i, j) = noise(rng);
        y[i] = x.at(i, 2) > 0 ? 1 : 0;
    }
    std::vector<PipelineSpec> specs;
    {
        PipelineSpec s;
        s.model.kind = ModelKindTag::LogReg;
        specs.push_back(s);
        s.model.kind = ModelKindTag::Knn;
        s.model.k = 5;
        specs.push_back(s);
        s.model.kind = ModelKindTag::BaggedTrees;
        s.model.n_trees = 30;
        s.calibration = CalibrationKind::Platt;
        specs.push_back(s);
        s.model.kind = ModelKindTag::LogReg;
        s.selector_k = 3;
        s.scaler = ScalerKind::Robust;
        specs.push_back(s);
    }
    for (const auto& spec : specs) {
        const auto fp = fit_pipeline(spec, x, y, 42);
        for (int i = 0; i < n; ++i) {
            const double p = fp.probability(x.row(i));
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
        }
    }
}

TEST_CASE("grid_search picks the dominant configuration") {
    std::vector<PipelineSpec> grid(3);
    grid[0].model.c = 0.3;
    grid[1].model.c = 1.0;
    grid[2].model.c = 3.0;

    SECTION("grid of one returns it") {
        const auto res = grid_search({grid[0]}, 4, [](const PipelineSpec&, int) { return 0.5; });
        CHECK(res.best_index == 0);
    }
    SECTION("dominance on every fold wins for any direction") {
        auto score = [&](const PipelineSpec& s, int fold) {
            return s.model.c == 1.0 ? 0.9 - fold * 0.01 : 0.5 - fold * 0.01;
        };
        CHECK(grid_search(grid, 5, score, true).best_index == 1);
        CHECK(grid_search(grid, 5, score, false).best_index == 0);  // lexicographic tie-break
    }
    SECTION("ties keep the earlier (lexicographically first) spec") {
        const auto res = grid_search(grid, 3, [](const PipelineSpec&, int) { return 0.7; });
        CHECK(res.best_index == 0);
    }
    SECTION("folds returning NaN are skipped") {
        auto score = [](const PipelineSpec& s, int fold) {
            if (fold == 0) return std::numeric_limits<double>::quiet_NaN();
            return s.model.c;
        };
        const auto res = grid_search(grid, 2, score);
        CHECK(res.best_index == 2);
        CHECK(res.mean_scores[2] == Approx(3.0));
    }
}
