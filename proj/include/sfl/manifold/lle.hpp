#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/numerics/distance.hpp"
#include "sfl/numerics/eigen.hpp"
#include "sfl/numerics/graph.hpp"
#include "sfl/numerics/linalg.hpp"

namespace sfl::manifold {

/// Reconstruction weights: row i holds the affine weights of i's k nearest
/// neighbors (zeros elsewhere); every row sums to 1.
inline Matrix lle_weights(const Matrix& x, std::size_t k, double reg) {
    require(reg > 0.0, ErrorKind::invalid_argument, "LLE regularization must be positive");
    const auto d = pairwise_distances(x);
    const auto nbrs = knn_indices(d, k);
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    Matrix w(n, n);
    Matrix z(k, dim);
    const std::vector<double> ones(k, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t c = 0; c < dim; ++c) z(a, c) = x(nbrs[i][a], c) - x(i, c);
        Matrix g = gram_of_rows(z);
        double trace = 0.0;
        for (std::size_t a = 0; a < k; ++a) trace += g(a, a);
        const double r = trace > 0.0 ? reg * trace : reg;
        for (std::size_t a = 0; a < k; ++a) g(a, a) += r;
        auto sol = solve_spd(g, ones);
        double sum = 0.0;
        for (double v : sol) sum += v;
        if (!std::isfinite(sum) || sum == 0.0)
            fail(ErrorKind::numerical_failure, "LLE: degenerate local Gram system at row " + std::to_string(i));
        for (std::size_t a = 0; a < k; ++a) w(i, nbrs[i][a]) = sol[a] / sum;
    }
    return w;
}

/// M = (I - W)ᵀ(I - W).
inline Matrix lle_cost_matrix(const Matrix& w) {
    const std::size_t n = w.rows();
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::pair<std::size_t, double>> row;  // nonzeros of (I - W) row r
        for (std::size_t c = 0; c < n; ++c) {
            const double v = (r == c ? 1.0 : 0.0) - w(r, c);
            if (v != 0.0) row.emplace_back(c, v);
        }
        for (auto [a, va] : row)
            for (auto [b, vb] : row) m(a, b) += va * vb;
    }
    return m;
}

inline EmbeddingResult fit_lle_distinct(const Matrix& x, std::size_t d, std::size_t k, double reg) {
    const std::size_t n = x.rows();
    require(d >= 1 && d + 1 < n, ErrorKind::invalid_argument, "LLE: n_components must be in [1, n-2]");
    const Matrix w = lle_weights(x, k, reg);
    const Matrix m = lle_cost_matrix(w);
    const auto eig = symmetric_eig(m);

    EmbeddingResult r;
    r.diagnostics.method = Method::lle;
    r.diagnostics.spectrum.assign(eig.eigenvalues.rbegin(), eig.eigenvalues.rend());
    r.coords = Matrix(n, d);
    const double scale = std::sqrt(static_cast<double>(n));
    // Ascending order: skip the constant null vector, take the next d.
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t col = n - 2 - j;
        for (std::size_t i = 0; i < n; ++i) r.coords(i, j) = eig.eigenvectors(i, col) * scale;
    }
    return r;
}

/// Coincident rows are embedded once and share coordinates; otherwise the
/// index tie-break in other rows' neighbor lists would pull copies apart.
inline EmbeddingResult fit_lle(const Matrix& x, std::size_t d, std::size_t k, double reg = 1e-3) {
    const auto rc = coincident_rows(pairwise_distances(x), x.rows());
    if (!rc.has_duplicates()) return fit_lle_distinct(x, d, k, reg);
    auto r = fit_lle_distinct(x.select_rows(rc.unique), d, k, reg);
    r.coords = broadcast_rows(r.coords, rc);
    return r;
}

}  // namespace sfl::manifold
