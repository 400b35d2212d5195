#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl {

/// B = -1/2 · J · sq · J with J = I - (1/n)·11ᵀ (classical MDS centering).
inline Matrix double_center(const Matrix& sq) {
    const std::size_t n = sq.rows();
    require(n == sq.cols(), ErrorKind::invalid_input, "double_center needs a square matrix");
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    // sq is symmetric, so column means equal row means.
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);
            b(i, j) = v;
            b(j, i) = v;
        }
    return b;
}

/// Solves G·x = b for symmetric positive definite G by Cholesky.
inline std::vector<double> solve_spd(const Matrix& g, std::span<const double> b) {
    const std::size_t n = g.rows();
    require(n == g.cols() && b.size() == n, ErrorKind::invalid_argument, "solve_spd shape mismatch");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = g(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag))
            fail(ErrorKind::numerical_failure, "solve_spd: matrix is singular or not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

}  // namespace sfl
