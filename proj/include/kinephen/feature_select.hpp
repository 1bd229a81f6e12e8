#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

// Mutual information of one feature column against a binary target, the
// feature discretized into 10 equal-width bins over its observed range.
// Natural log; a constant column scores 0.
inline double mutual_information_binned(std::span<const double> col,
                                        const std::vector<std::uint8_t>& y) {
    constexpr int kBins = 10;
    const auto n = static_cast<double>(col.size());
    double lo = col[0], hi = col[0];
    for (double v : col) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) return 0.0;
    const double width = (hi - lo) / kBins;
    std::array<std::array<double, 2>, kBins> joint{};
    for (std::size_t i = 0; i < col.size(); ++i) {
        int b = static_cast<int>((col[i] - lo) / width);
        if (b >= kBins) b = kBins - 1;
        joint[b][y[i] ? 1 : 0] += 1.0;
    }
    std::array<double, kBins> pb{};
    std::array<double, 2> pc{};
    for (int b = 0; b < kBins; ++b)
        for (int c = 0; c < 2; ++c) {
            pb[b] += joint[b][c];
            pc[c] += joint[b][c];
        }
    double mi = 0.0;
    for (int b = 0; b < kBins; ++b)
        for (int c = 0; c < 2; ++c) {
            if (joint[b][c] <= 0) continue;
            const double pbc = joint[b][c] / n;
            mi += pbc * std::log(joint[b][c] * n / (pb[b] * pc[c]));
        }
    return std::max(0.0, mi);
}

// Top-k feature indices by mutual information, ties to the lower index.
// Returned ascending so column slicing is order-stable.
inline std::vector<int> select_k_best_mi(const Matrix& train, const std::vector<std::uint8_t>& y,
                                         int k) {
    if (k < 1) throw InputError("selector k must be >= 1");
    k = std::min<int>(k, static_cast<int>(train.cols));
    std::vector<double> scores(train.cols, 0.0);
    std::vector<double> col(train.rows);
    for (std::size_t c = 0; c < train.cols; ++c) {
        for (std::size_t r = 0; r < train.rows; ++r) col[r] = train.at(r, c);
        scores[c] = mutual_information_binned(col, y);
    }
    std::vector<int> order(train.cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

inline Matrix select_columns(const Matrix& m, const std::vector<int>& cols) {
    Matrix out(m.rows, cols.size());
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.at(r, c) = m.at(r, static_cast<std::size_t>(cols[c]));
    return out;
}

}  // namespace kinephen
