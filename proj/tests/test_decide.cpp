#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kinephen/decide.hpp"
#include "oracles.hpp"

using namespace kinephen;
using Catch::Approx;

namespace {

// test-side exhaustive tuner: scan the full grid with independently coded
// feasibility and cost
struct OracleTune {
    double tau = 1.0;
    bool feasible = false;
    double cost = 0;
};

OracleTune oracle_tune(const std::vector<TrainingPoint>& train, double alpha,
                       const ThresholdConstraints& con) {
    OracleTune best;
    double n_pos = 0, n_neg = 0, n_ctrl = 0;
    for (const auto& s : train) {
        if (s.truth) n_pos += 1;
        else n_neg += 1;
        if (s.is_control) n_ctrl += 1;
    }
    if (n_pos == 0 || n_neg == 0) return best;
    for (double t : threshold_grid()) {
        double fp = 0, fn = 0, cfp = 0;
        for (const auto& s : train) {
            const bool call = s.pooled >= t;
            if (call && !s.truth) fp += 1;
            if (call && !s.truth && s.is_control) cfp += 1;
            if (!call && s.truth) fn += 1;
        }
        bool ok = true;
        if (con.max_control_fp && cfp > *con.max_control_fp) ok = false;
        if (con.max_control_fpr && n_ctrl > 0 && cfp / n_ctrl > *con.max_control_fpr + 1e-12)
            ok = false;
        if (con.min_specificity && (n_neg - fp) / n_neg < *con.min_specificity - 1e-12) ok = false;
        if (!ok) continue;
        const double cost = (1 - alpha) * fp / n_neg + alpha * fn / n_pos;
        if (!best.feasible || cost < best.cost - 1e-12 ||
            (std::abs(cost - best.cost) <= 1e-12 && t > best.tau)) {
            best.feasible = true;
            best.cost = cost;
            best.tau = t;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("majority_vote with the >= 0.5 boundary") {
    CHECK(majority_vote(std::vector<std::uint8_t>{1, 1, 0}) == 1);
    CHECK(majority_vote(std::vector<std::uint8_t>{1, 0}) == 1);
    CHECK(majority_vote(std::vector<std::uint8_t>{0, 0, 0}) == 0);
}

TEST_CASE("pooling operators") {
    SECTION("constants pass through every kind except noisy-OR") {
        const std::vector<double> c(12, 0.42);
        CHECK(pool(c, {PoolingKind::Percentile, 0.9}) == Approx(0.42));
        CHECK(pool(c, {PoolingKind::Max}) == Approx(0.42));
        PoolingSpec topk{PoolingKind::TopKMean};
        topk.k = 5;
        CHECK(pool(c, topk) == Approx(0.42));
    }
    SECTION("noisy-OR accumulates evidence") {
        CHECK(pool(std::vector<double>{0.5, 0.5}, {PoolingKind::NoisyOr}) == Approx(0.75));
    }
    SECTION("p90 by linear interpolation") {
        std::vector<double> probs(9, 0.1);
        probs.push_back(0.95);
        // rank (n-1)q = 8.1 between the ninth 0.1 and the 0.95
        CHECK(pool(probs, {PoolingKind::Percentile, 0.90}) ==
              Approx(oracle::quantile_linear(probs, 0.90)));
        CHECK(pool(probs, {PoolingKind::Percentile, 0.90}) == Approx(0.185));
        // at q = 0.99 the same vector interpolates to 0.8735
        CHECK(pool(probs, {PoolingKind::Percentile, 0.99}) == Approx(0.8735));
    }
    SECTION("top-k with k > n uses all values") {
        PoolingSpec topk{PoolingKind::TopKMean};
        topk.k = 10;
        CHECK(pool(std::vector<double>{0.2, 0.4}, topk) == Approx(0.3));
    }
}

TEST_CASE("pooling invariants") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<double> probs(n);
        for (auto& p : probs) p = unit(rng);
        const PoolingSpec kinds[] = {{PoolingKind::Percentile, 0.9},
                                     {PoolingKind::Max},
                                     {PoolingKind::TopKMean, 0.9, 3},
                                     {PoolingKind::NoisyOr}};
        const double mx = pool(probs, {PoolingKind::Max});
        const double noisy = pool(probs, {PoolingKind::NoisyOr});
        REQUIRE(noisy >= mx - 1e-12);  // noisy-OR dominates max
        for (const auto& kind : kinds) {
            const double base = pool(probs, kind);
            REQUIRE(base >= *std::min_element(probs.begin(), probs.end()) - 1e-12);
            REQUIRE(base <= 1.0 + 1e-12);
            // raising one element never lowers the pooled value
            auto raised = probs;
            const std::size_t at = rng() % n;
            raised[at] = std::min(1.0, raised[at] + unit(rng) * (1.0 - raised[at]));
            REQUIRE(pool(raised, kind) >= base - 1e-12);
        }
    }
}

TEST_CASE("threshold grid shape") {
    const auto& grid = threshold_grid();
    REQUIRE(grid.size() == 199);
    CHECK(grid.front() == Approx(0.01));
    CHECK(grid.back() == Approx(0.99));
    for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] > grid[i - 1]);
}

TEST_CASE("tune_threshold on a perfectly separated set") {
    std::vector<TrainingPoint> train;
    for (int i = 0; i < 5; ++i) train.push_back({0.9, true, false});
    for (int i = 0; i < 5; ++i) train.push_back({0.1, false, i < 2});
    const auto got = tune_threshold(train, 0.5, {});
    REQUIRE(got.feasible);
    CHECK(got.cost == Approx(0.0));
    // entire (0.1, 0.9] region has zero cost; tie-break takes the largest
    // grid point in it
    const auto expect = oracle_tune(train, 0.5, {});
    CHECK(got.tau == Approx(expect.tau));
    CHECK(got.tau > 0.89);
    CHECK(got.tau <= 0.9);
}

TEST_CASE("tune_threshold infeasible constraint pins tau to 1") {
    std::vector<TrainingPoint> train;
    train.push_back({0.9, true, false});
    train.push_back({0.99, false, true});  // control scoring sky-high
    ThresholdConstraints con;
    con.max_control_fp = 0;
    const auto got = tune_threshold(train, 0.5, con);
    CHECK_FALSE(got.feasible);
    CHECK(got.tau == 1.0);
}

TEST_CASE("tune_threshold with alpha = 1 ignores false positives") {
    std::vector<TrainingPoint> train;
    train.push_back({0.6, true, false});
    train.push_back({0.8, true, false});
    train.push_back({0.3, false, true});
    train.push_back({0.4, false, true});
    const auto got = tune_threshold(train, 1.0, {});
    const auto expect = oracle_tune(train, 1.0, {});
    REQUIRE(got.feasible);
    CHECK(got.cost == Approx(0.0));
    // all grid points at or below the lowest positive have zero cost; the
    // largest of them is chosen
    CHECK(got.tau == Approx(expect.tau));
    CHECK(got.tau <= 0.6);
    CHECK(got.tau > 0.59);
}

TEST_CASE("tune_threshold degenerate class handling") {
    std::vector<TrainingPoint> train;
    train.push_back({0.7, true, false});
    train.push_back({0.8, true, false});
    const auto got = tune_threshold(train, 0.5, {});
    CHECK(got.degenerate);
    CHECK(got.tau == 1.0);
}

TEST_CASE("tune_threshold matches the exhaustive oracle on random problems") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TrainingPoint> train;
        const int n = 4 + static_cast<int>(rng() % 20);
        bool pos = false, neg = false;
        for (int i = 0; i < n; ++i) {
            TrainingPoint p;
            p.pooled = unit(rng);
            p.truth = rng() % 2 == 0;
            p.is_control = !p.truth && rng() % 2 == 0;
            (p.truth ? pos : neg) = true;
            train.push_back(p);
        }
        if (!pos || !neg) continue;
        ThresholdConstraints con;
        if (rng() % 2) con.max_control_fp = static_cast<int>(rng() % 3);
        if (rng() % 2) con.max_control_fpr = unit(rng);
        if (rng() % 2) con.min_specificity = unit(rng);
        const double alpha = unit(rng);
        const auto got = tune_threshold(train, alpha, con);
        const auto expect = oracle_tune(train, alpha, con);
        REQUIRE(got.feasible == expect.feasible);
        if (got.feasible) {
            REQUIRE(got.tau == Approx(expect.tau));
            REQUIRE(got.cost == Approx(expect.cost));
        } else {
            REQUIRE(got.tau == 1.0);
        }
    }
}

TEST_CASE("calls only change when tau crosses a subject's pooled value") {
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> pooled(6);
    for (auto& p : pooled) p = 0.05 + 0.9 * unit(rng);
    auto calls_at = [&](double tau) {
        std::vector<int> c;
        for (double p : pooled) c.push_back(p >= tau ? 1 : 0);
        return c;
    };
    auto sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i + 1] - sorted[i] < 1e-9) continue;
        const double a = sorted[i] + 0.25 * (sorted[i + 1] - sorted[i]);
        const double b = sorted[i] + 0.75 * (sorted[i + 1] - sorted[i]);
        CHECK(calls_at(a) == calls_at(b));  // constant between distinct values
    }
    CHECK(calls_at(sorted[2] - 1e-9) != calls_at(sorted[2] + 1e-9));
}

TEST_CASE("infer_profiles assembles per-subject calls") {
    std::map<std::string, bool> is_control{{"p1", false}, {"c1", true}};
    std::array<std::optional<LabelInference>, kNumPhenotypes> per_label;

    LabelInference inf;
    inf.window_probs = {0.8, 0.2, 0.1};
    inf.subjects = {"p1", "c1", "c1"};
    inf.window_truth = {1, 0, 0};
    inf.valid = {1, 1, 1};
    inf.tau = 0.5;
    per_label[0] = inf;

    const auto profiles = infer_profiles(per_label, {PoolingKind::Percentile, 0.9}, is_control);
    REQUIRE(profiles.size() == 2);
    const auto& c1 = profiles[0];  // sorted by subject id
    CHECK(c1.subject_id == "c1");
    CHECK(c1.is_control);
    CHECK(c1.calls[0] == 0);
    CHECK(c1.roles[0] == ConfusionRole::TN);
    const auto& p1 = profiles[1];
    CHECK(p1.calls[0] == 1);
    CHECK(p1.roles[0] == ConfusionRole::TP);

    SECTION("a single window pools to its own probability under every kind") {
        for (auto kind : {PoolingKind::Percentile, PoolingKind::Max, PoolingKind::TopKMean,
                          PoolingKind::NoisyOr}) {
            PoolingSpec spec;
            spec.kind = kind;
            const auto pr = infer_profiles(per_label, spec, is_control);
            CHECK(pr[1].pooled[0] == Approx(0.8));
        }
    }
    SECTION("masked windows are excluded from pooling and truth") {
        auto masked = inf;
        masked.valid = {1, 1, 0};
        per_label[0] = masked;
        const auto pr = infer_profiles(per_label, {PoolingKind::Max}, is_control);
        CHECK(pr[0].pooled[0] == Approx(0.2));  // c1's 0.1 window is masked out
    }
}
