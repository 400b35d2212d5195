#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/numerics/eigen.hpp"

namespace sfl::manifold {

/// Fitted principal axes. Also usable out-of-sample (train-only mode).
struct PcaModel {
    std::vector<double> mean;
    Matrix components;               // cols × d, column j is axis j (unit norm)
    std::vector<double> eigenvalues;  // covariance spectrum, descending

    Matrix project(const Matrix& x) const {
        require(x.cols() == mean.size(), ErrorKind::invalid_argument, "PCA projection: column count mismatch");
        const std::size_t d = components.cols();
        Matrix out(x.rows(), d);
        std::vector<double> centered(x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t c = 0; c < x.cols(); ++c) centered[c] = x(i, c) - mean[c];
            for (std::size_t j = 0; j < d; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < x.cols(); ++c) s += centered[c] * components(c, j);
                out(i, j) = s;
            }
        }
        return out;
    }

    /// components · coordsᵀ, i.e. the centered input when d equals the column count.
    Matrix reconstruct_centered(const Matrix& coords) const {
        return matmul(coords, components.transposed());
    }
};

inline PcaModel fit_pca_model(const Matrix& x, std::size_t d) {
    const std::size_t n = x.rows();
    const std::size_t cols = x.cols();
    require(n >= 2, ErrorKind::invalid_input, "PCA needs at least 2 rows");
    require(d >= 1 && d <= cols, ErrorKind::invalid_argument, "PCA: n_components must be in [1, columns]");
    require_finite(x, "PCA input");

    Matrix xc = x;
    PcaModel model;
    model.mean = center_columns(xc);
    model.components = Matrix(cols, d);
    const double denom = static_cast<double>(n - 1);

    if (cols <= n) {
        Matrix cov = gram_of_columns(xc);
        cov *= 1.0 / denom;
        auto eig = symmetric_eig(cov);
        model.eigenvalues = eig.eigenvalues;
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t j = 0; j < d; ++j) model.components(c, j) = eig.eigenvectors(c, j);
        return model;
    }

    // Wide data: diagonalize the n×n Gram matrix and map back.
    Matrix gram = gram_of_rows(xc);
    gram *= 1.0 / denom;
    auto eig = symmetric_eig(gram);
    model.eigenvalues = eig.eigenvalues;
    const double cutoff = 1e-12 * std::max(1.0, eig.eigenvalues.front());
    for (std::size_t j = 0; j < d; ++j) {
        const double lambda = j < n ? eig.eigenvalues[j] : 0.0;
        if (j >= n || lambda <= cutoff) continue;  // rank exhausted: axis left at zero
        std::vector<double> v(cols, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = eig.eigenvectors(i, j);
            auto row = xc.row(i);
            for (std::size_t c = 0; c < cols; ++c) v[c] += u * row[c];
        }
        double norm = 0.0;
        for (double e : v) norm += e * e;
        norm = std::sqrt(norm);
        std::size_t big = 0;
        for (std::size_t c = 1; c < cols; ++c)
            if (std::abs(v[c]) > std::abs(v[big])) big = c;
        const double sign = v[big] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < cols; ++c) model.components(c, j) = sign * v[c] / norm;
    }
    return model;
}

/// Projection onto the top-d principal axes. Allows d equal to the column
/// count (lossless); reduce() restricts d to fewer columns than the input.
inline EmbeddingResult fit_pca(const Matrix& x, std::size_t d) {
    auto model = fit_pca_model(x, d);
    EmbeddingResult r;
    r.coords = model.project(x);
    r.diagnostics.method = Method::pca;
    r.diagnostics.spectrum = std::move(model.eigenvalues);
    return r;
}

}  // namespace sfl::manifold
