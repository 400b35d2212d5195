#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/parallel.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/numerics/distance.hpp"

namespace sfl::manifold {

inline constexpr double kSmacofDistanceGuard = 1e-12;

/// Σ_{i<j} (target_ij - δ_ij(x))².
inline double raw_stress(const DistanceMatrix& target, const Matrix& x) {
    const std::size_t n = x.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dd = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                const double diff = x(i, c) - x(j, c);
                dd += diff * diff;
            }
            const double r = target(i, j) - std::sqrt(dd);
            s += r * r;
        }
    return s;
}

struct SmacofRun {
    Matrix coords;
    double stress = 0.0;
    std::vector<double> history;  // stress of the initial layout, then after every Guttman step
    std::size_t iterations = 0;
};

/// One SMACOF descent from `init` with unit weights.
inline SmacofRun smacof(const DistanceMatrix& target, Matrix init, std::size_t max_iter, double tol) {
    const std::size_t n = init.rows();
    const std::size_t dim = init.cols();
    require(target.size() == n, ErrorKind::invalid_argument, "SMACOF: init rows do not match distance matrix");

    Matrix delta(n, n);
    auto measure = [&](const Matrix& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = x.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                auto xj = x.row(j);
                double dd = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double diff = xi[c] - xj[c];
                    dd += diff * diff;
                }
                const double dist = std::sqrt(dd);
                delta(i, j) = dist;
                delta(j, i) = dist;
                const double r = target(i, j) - dist;
                s += r * r;
            }
        }
        return s;
    };

    SmacofRun run;
    run.coords = std::move(init);
    double sigma = measure(run.coords);
    run.history.push_back(sigma);
    Matrix next(n, dim);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        // Guttman transform: x⁺ = (1/n)·B(x)·x.
        for (std::size_t i = 0; i < n; ++i) {
            auto out = next.row(i);
            std::fill(out.begin(), out.end(), 0.0);
            auto xi = run.coords.row(i);
            auto drow = delta.row(i);
            auto trow = target.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || drow[j] < kSmacofDistanceGuard) continue;
                const double ratio = trow[j] / drow[j];
                auto xj = run.coords.row(j);
                for (std::size_t c = 0; c < dim; ++c) out[c] += ratio * (xi[c] - xj[c]);
            }
            for (auto& v : out) v *= inv_n;
        }
        std::swap(run.coords, next);
        const double updated = measure(run.coords);
        run.history.push_back(updated);
        run.iterations = it + 1;
        const double rel = (sigma - updated) / std::max(sigma, 1e-12);
        sigma = updated;
        if (rel < tol) break;
    }
    run.stress = sigma;
    return run;
}

/// Metric MDS by SMACOF with `n_init` random restarts; lowest stress wins,
/// ties to the earlier restart.
inline EmbeddingResult fit_mds_smacof(const DistanceMatrix& target, std::size_t d, std::size_t n_init,
                                      std::size_t max_iter, double tol, std::uint64_t seed, std::size_t jobs = 1) {
    const std::size_t n = target.size();
    require(n >= 3, ErrorKind::invalid_input, "MDS needs at least 3 rows");
    require(d >= 1, ErrorKind::invalid_argument, "MDS: n_components must be >= 1");
    require(n_init >= 1, ErrorKind::invalid_argument, "MDS: n_init must be >= 1");

    std::vector<SmacofRun> runs(n_init);
    parallel_for(n_init, jobs, [&](std::size_t r) {
        RngStream rng(seed, r);
        Matrix init(n, d);
        for (auto& v : init.data()) v = rng.uniform(-1.0, 1.0);
        tie_duplicate_rows(init, target);
        runs[r] = smacof(target, std::move(init), max_iter, tol);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].stress < runs[best].stress) best = r;

    EmbeddingResult res;
    res.diagnostics.method = Method::mds;
    res.diagnostics.stress = runs[best].stress;
    res.diagnostics.best_restart = best;
    res.diagnostics.iterations = runs[best].iterations;
    for (auto& r : runs) res.diagnostics.stress_history.push_back(r.history);
    res.coords = std::move(runs[best].coords);
    return res;
}

inline EmbeddingResult fit_mds_smacof(const Matrix& x, std::size_t d, std::size_t n_init = 4,
                                      std::size_t max_iter = 300, double tol = 1e-6, std::uint64_t seed = 42,
                                      std::size_t jobs = 1) {
    return fit_mds_smacof(pairwise_distances(x), d, n_init, max_iter, tol, seed, jobs);
}

}  // namespace sfl::manifold
