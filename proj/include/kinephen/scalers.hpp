#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "kinephen/core.hpp"
#include "kinephen/errors.hpp"

namespace kinephen {

enum class ScalerKind : int { Standard = 0, MinMax, Robust, PowerYJ };

inline constexpr std::array<std::string_view, 4> kScalerNames = {"standard", "minmax", "robust",
                                                                 "power_yj"};

inline std::string_view scaler_name(ScalerKind k) { return kScalerNames[static_cast<int>(k)]; }

inline ScalerKind parse_scaler(std::string_view s) {
    for (int i = 0; i < 4; ++i)
        if (kScalerNames[i] == s) return static_cast<ScalerKind>(i);
    throw InputError("unknown scaler: " + std::string(s));
}

// Yeo-Johnson power transform of a single value.
inline double yeo_johnson(double x, double lambda) {
    if (x >= 0) {
        if (std::abs(lambda) < 1e-12) return std::log1p(x);
        return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
    }
    if (std::abs(lambda - 2.0) < 1e-12) return -std::log1p(-x);
    return -(std::pow(1.0 - x, 2.0 - lambda) - 1.0) / (2.0 - lambda);
}

namespace detail {

// Profile log-likelihood of the Yeo-Johnson parameter.
inline double yj_log_likelihood(std::span<const double> col, double lambda) {
    std::vector<double> t(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) t[i] = yeo_johnson(col[i], lambda);
    const double m = vec_mean(t);
    const double var = vec_var(t, m);
    if (var <= 0 || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
    double ll = -0.5 * static_cast<double>(col.size()) * std::log(var);
    for (double x : col) ll += (lambda - 1.0) * (x >= 0 ? std::log1p(x) : -std::log1p(-x));
    return ll;
}

// Coarse scan over [-5, 5] followed by golden-section refinement.
inline double fit_yj_lambda(std::span<const double> col) {
    double best_lambda = 1.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double lam = -5.0; lam <= 5.0 + 1e-9; lam += 0.25) {
        const double ll = yj_log_likelihood(col, lam);
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = lam;
        }
    }
    if (!std::isfinite(best_ll)) return 1.0;  // constant column
    double lo = best_lambda - 0.25, hi = best_lambda + 0.25;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = yj_log_likelihood(col, a), fb = yj_log_likelihood(col, b);
    for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = yj_log_likelihood(col, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = yj_log_likelihood(col, a);
        }
    }
    return (lo + hi) / 2.0;
}

}  // namespace detail

// Column-wise scaler fit on training rows only. Degenerate columns (zero
// spread) transform to 0 for every affine kind.
struct FittedScaler {
    ScalerKind kind = ScalerKind::Standard;
    std::vector<double> center;   // mu / min / median / post-YJ mean
    std::vector<double> spread;   // sigma / range / IQR / post-YJ sigma
    std::vector<double> lambda;   // PowerYJ only

    double transform_value(std::size_t col, double v) const {
        if (kind == ScalerKind::PowerYJ) v = yeo_johnson(v, lambda[col]);
        if (spread[col] <= 0) return 0.0;
        return sanitize_value((v - center[col]) / spread[col]);
    }

    void transform_row(std::span<const double> in, std::span<double> out) const {
        for (std::size_t c = 0; c < in.size(); ++c) out[c] = transform_value(c, in[c]);
    }
};

inline FittedScaler fit_scaler(ScalerKind kind, const Matrix& train) {
    FittedScaler s;
    s.kind = kind;
    s.center.resize(train.cols, 0.0);
    s.spread.resize(train.cols, 0.0);
    if (kind == ScalerKind::PowerYJ) s.lambda.resize(train.cols, 1.0);
    if (train.rows == 0) throw DegenerateDataset("cannot fit scaler on empty matrix");

    std::vector<double> col(train.rows);
    for (std::size_t c = 0; c < train.cols; ++c) {
        for (std::size_t r = 0; r < train.rows; ++r) col[r] = train.at(r, c);
        switch (kind) {
            case ScalerKind::Standard: {
                s.center[c] = vec_mean(col);
                s.spread[c] = std::sqrt(vec_var(col, s.center[c]));
                break;
            }
            case ScalerKind::MinMax: {
                const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
                s.center[c] = *mn;
                s.spread[c] = *mx - *mn;
                break;
            }
            case ScalerKind::Robust: {
                std::vector<double> sorted = col;
                std::sort(sorted.begin(), sorted.end());
                s.center[c] = quantile_sorted(sorted, 0.5);
                s.spread[c] = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
                break;
            }
            case ScalerKind::PowerYJ: {
                s.lambda[c] = detail::fit_yj_lambda(col);
                std::vector<double> t(col.size());
                for (std::size_t i = 0; i < col.size(); ++i) t[i] = yeo_johnson(col[i], s.lambda[c]);
                s.center[c] = vec_mean(t);
                s.spread[c] = std::sqrt(vec_var(t, s.center[c]));
                break;
            }
        }
    }
    return s;
}

inline Matrix apply_scaler(const FittedScaler& s, const Matrix& m) {
    Matrix out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) s.transform_row(m.row(r), out.row(r));
    return out;
}

}  // namespace kinephen
