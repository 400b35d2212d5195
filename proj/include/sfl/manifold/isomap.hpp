#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/numerics/distance.hpp"
#include "sfl/numerics/eigen.hpp"
#include "sfl/numerics/graph.hpp"
#include "sfl/numerics/linalg.hpp"

namespace sfl::manifold {

/// Classical (Torgerson) scaling of a distance matrix; negative eigenvalues
/// are clamped to zero.
inline EmbeddingResult classical_scaling(const DistanceMatrix& d, std::size_t dims) {
    const std::size_t n = d.size();
    require(dims >= 1 && dims <= n, ErrorKind::invalid_argument, "classical scaling: bad n_components");
    const auto eig = symmetric_eig(double_center(d.squared()));
    EmbeddingResult r;
    r.diagnostics.spectrum = eig.eigenvalues;
    r.coords = Matrix(n, dims);
    for (std::size_t j = 0; j < dims; ++j) {
        const double s = std::sqrt(std::max(eig.eigenvalues[j], 0.0));
        for (std::size_t i = 0; i < n; ++i) r.coords(i, j) = eig.eigenvectors(i, j) * s;
    }
    return r;
}

inline DistanceMatrix geodesic_distances(const Matrix& x, std::size_t k, std::size_t jobs = 1) {
    return all_pairs_shortest(knn(pairwise_distances(x), k, true), jobs);
}

inline EmbeddingResult fit_isomap(const Matrix& x, std::size_t d, std::size_t k, std::size_t jobs = 1) {
    require(d >= 1 && d < x.rows(), ErrorKind::invalid_argument, "ISO: n_components must be in [1, n-1]");
    auto r = classical_scaling(geodesic_distances(x, k, jobs), d);
    r.diagnostics.method = Method::iso;
    return r;
}

}  // namespace sfl::manifold
