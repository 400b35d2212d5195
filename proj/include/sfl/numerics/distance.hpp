#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl {

/// Symmetric, zero-diagonal, nonnegative n×n matrix. Writes go through set(),
/// which updates both triangles so symmetry holds exactly.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : m_(n, n) {}

    /// Validating conversion from a plain matrix.
    static DistanceMatrix from_matrix(const Matrix& m) {
        require(m.rows() == m.cols(), ErrorKind::invalid_input, "distance matrix must be square");
        DistanceMatrix d(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            require(m(i, i) == 0.0, ErrorKind::invalid_input, "distance matrix diagonal must be zero");
            for (std::size_t j = i + 1; j < m.cols(); ++j) {
                const double v = m(i, j);
                require(std::isfinite(v) && v >= 0.0 && v == m(j, i), ErrorKind::invalid_input,
                        "distance matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                            ") is negative, non-finite or asymmetric");
                d.set(i, j, v);
            }
        }
        return d;
    }

    std::size_t size() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    std::span<const double> row(std::size_t i) const noexcept { return m_.row(i); }

    void set(std::size_t i, std::size_t j, double v) noexcept {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const Matrix& matrix() const noexcept { return m_; }

    /// Entry-wise square, the input expected by double_center().
    Matrix squared() const {
        Matrix sq = m_;
        for (auto& v : sq.data()) v *= v;
        return sq;
    }

private:
    Matrix m_;
};

/// Euclidean distances between the rows of X.
inline DistanceMatrix pairwise_distances(const Matrix& x) {
    require(x.rows() >= 2, ErrorKind::invalid_input, "pairwise_distances needs at least 2 rows");
    require_finite(x, "pairwise_distances");
    const std::size_t n = x.rows();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto xj = x.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double diff = xi[k] - xj[k];
                s += diff * diff;
            }
            d.set(i, j, std::sqrt(s));
        }
    }
    return d;
}

}  // namespace sfl
