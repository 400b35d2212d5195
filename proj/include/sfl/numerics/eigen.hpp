#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl {

struct SymEigResult {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // column k pairs with eigenvalues[k]
    std::size_t sweeps = 0;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sign convention: the largest-magnitude entry of every eigenvector is
/// positive (first such entry on ties).
inline SymEigResult symmetric_eig(const Matrix& input, std::size_t max_sweeps = 100) {
    const std::size_t n = input.rows();
    require(n == input.cols(), ErrorKind::invalid_input, "symmetric_eig needs a square matrix");
    require_finite(input, "symmetric_eig");
    double scale = 1.0;
    for (double v : input.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > 1e-12 * scale)
                fail(ErrorKind::invalid_input, "symmetric_eig: matrix is not symmetric at (" + std::to_string(i) +
                                                   "," + std::to_string(j) + ")");

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = input(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (input(i, j) + input(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    // Rows of vt are eigenvectors while iterating; keeps rotations contiguous.
    Matrix vt = Matrix::identity(n);

    double frob = 0.0;
    for (double v : a.data()) frob += v * v;
    const double target = frob * 1e-30;

    SymEigResult res;
    bool converged = false;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= target || off == 0.0) {
            converged = true;
            res.sweeps = sweep;
            break;
        }
        // Early sweeps skip rotations that would barely move the matrix.
        const double thresh = sweep < 3 ? 0.2 * std::sqrt(off) / static_cast<double>(n * n) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double g = 100.0 * std::abs(apq);
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= thresh || apq == 0.0) continue;

                const double theta = (aqq - app) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                auto rp = a.row(p);
                auto rq = a.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = rp[k];
                    const double akq = rq[k];
                    const double np = c * akp - s * akq;
                    const double nq = s * akp + c * akq;
                    rp[k] = np;
                    rq[k] = nq;
                    a(k, p) = np;
                    a(k, q) = nq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                auto vp = vt.row(p);
                auto vq = vt.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    const double x = vp[k];
                    const double y = vq[k];
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off > target && off != 0.0)
            fail(ErrorKind::numerical_failure,
                 "symmetric_eig: no convergence after " + std::to_string(max_sweeps) + " sweeps");
        res.sweeps = max_sweeps;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    res.eigenvalues.resize(n);
    res.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = order[k];
        res.eigenvalues[k] = a(src, src);
        auto v = vt.row(src);
        std::size_t big = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v[i]) > std::abs(v[big])) big = i;
        const double sign = v[big] < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = sign * v[i];
    }
    return res;
}

}  // namespace sfl
