#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kinephen/errors.hpp"

namespace kinephen {

// Solves A x = b for symmetric positive definite A (row-major, n x n) via
// Cholesky. A tiny diagonal ridge is added on failure; the penalized Hessians
// solved here are positive definite by construction so this is a last resort.
inline std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                          std::size_t n) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<double> l(n * n, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = a[i * n + j];
                for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
                if (i == j) {
                    if (sum <= 0 || !std::isfinite(sum)) {
                        ok = false;
                        break;
                    }
                    l[i * n + i] = std::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        if (!ok) {
            double ridge = 1e-10;
            for (int r = 0; r < attempt; ++r) ridge *= 100.0;
            for (std::size_t i = 0; i < n; ++i) a[i * n + i] += ridge;
            continue;
        }
        // forward then backward substitution
        std::vector<double> y(n, 0.0), x(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= l[i * n + k] * y[k];
            y[i] = sum / l[i * n + i];
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double sum = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) sum -= l[k * n + ii] * x[k];
            x[ii] = sum / l[ii * n + ii];
        }
        return x;
    }
    throw InternalError("cholesky_solve: matrix not positive definite");
}

}  // namespace kinephen
