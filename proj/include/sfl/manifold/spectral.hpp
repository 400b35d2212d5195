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

namespace sfl::manifold {

struct Laplacian {
    Matrix l;                    // I - D^{-1/2} A D^{-1/2}
    std::vector<double> degree;  // row sums of the binary affinity
};

inline Laplacian normalized_laplacian(const NeighborGraph& g) {
    require(g.symmetrized, ErrorKind::invalid_argument, "Laplacian needs a symmetrized graph");
    require_connected(g);
    Laplacian lap;
    lap.degree.assign(g.n, 0.0);
    for (const auto& e : g.edges) lap.degree[e.from] += 1.0;
    lap.l = Matrix::identity(g.n);
    for (const auto& e : g.edges)
        lap.l(e.from, e.to) -= 1.0 / std::sqrt(lap.degree[e.from] * lap.degree[e.to]);
    return lap;
}

inline EmbeddingResult fit_spectral_distinct(const Matrix& x, std::size_t d, std::size_t k) {
    const std::size_t n = x.rows();
    require(d >= 1 && d + 1 < n, ErrorKind::invalid_argument, "SE: n_components must be in [1, n-2]");
    const auto g = knn(pairwise_distances(x), k, true);
    const auto lap = normalized_laplacian(g);
    const auto eig = symmetric_eig(lap.l);

    EmbeddingResult r;
    r.diagnostics.method = Method::se;
    r.diagnostics.spectrum.assign(eig.eigenvalues.rbegin(), eig.eigenvalues.rend());
    r.coords = Matrix(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t col = n - 2 - j;
        for (std::size_t i = 0; i < n; ++i)
            r.coords(i, j) = eig.eigenvectors(i, col) / std::sqrt(lap.degree[i]);
    }
    return r;
}

/// Laplacian eigenmaps on the binary symmetrized k-NN affinity. Coincident
/// rows are embedded once and share coordinates.
inline EmbeddingResult fit_spectral(const Matrix& x, std::size_t d, std::size_t k) {
    const auto rc = coincident_rows(pairwise_distances(x), x.rows());
    if (!rc.has_duplicates()) return fit_spectral_distinct(x, d, k);
    auto r = fit_spectral_distinct(x.select_rows(rc.unique), d, k);
    r.coords = broadcast_rows(r.coords, rc);
    return r;
}

}  // namespace sfl::manifold
