#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/numerics/distance.hpp"

namespace sfl::manifold {

struct TsneOptions {
    double perplexity = 30.0;
    std::size_t max_iter = 1000;
    double learning_rate = 200.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t switch_iter = 250;  // momentum switch and end of exaggeration
    double exaggeration = 12.0;
    double init_stddev = 1e-4;
    double min_gain = 0.01;  // per-coordinate adaptive gains (delta-bar-delta)
};

inline constexpr double kTsneFloor = 1e-12;

/// Row i: conditional p_{j|i} with the precision tuned so 2^H matches the
/// perplexity. `entropy_bits` receives H per row when non-null.
inline Matrix conditional_affinities(const DistanceMatrix& d, double perplexity,
                                     std::vector<double>* entropy_bits = nullptr) {
    const std::size_t n = d.size();
    require(perplexity > 0.0 && 3.0 * perplexity < static_cast<double>(n - 1), ErrorKind::invalid_argument,
            "t-SNE: perplexity must be positive and below (n-1)/3");
    const double target = std::log2(perplexity);
    Matrix p(n, n);
    if (entropy_bits) entropy_bits->assign(n, 0.0);
    std::vector<double> sq(n);
    std::vector<double> shifted;  // ascending, self excluded
    for (std::size_t i = 0; i < n; ++i) {
        double min_sq = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            sq[j] = d(i, j) * d(i, j);
            if (j != i) min_sq = std::min(min_sq, sq[j]);
        }
        // Sums run over the sorted distances so that coincident rows get
        // bit-identical normalizers regardless of their position.
        shifted.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) shifted.push_back(sq[j] - min_sq);
        std::sort(shifted.begin(), shifted.end());
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double h = 0.0;
        double sum = 0.0;
        for (int step = 0; step < 50; ++step) {
            sum = 0.0;
            double weighted = 0.0;
            for (double s : shifted) {
                const double e = std::exp(-beta * s);
                sum += e;
                weighted += e * s;
            }
            // H in nats = log(sum) + beta·E[shifted]; convert to bits.
            h = (std::log(sum) + beta * weighted / sum) / std::log(2.0);
            const double diff = h - target;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
        auto row = p.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = j == i ? 0.0 : std::exp(-beta * (sq[j] - min_sq)) / sum;
        if (entropy_bits) (*entropy_bits)[i] = h;
    }
    return p;
}

/// p_ij = (p_{j|i} + p_{i|j}) / 2n, floored at 1e-12 off the diagonal. The
/// entries above the floor are rescaled so the total stays exactly 1.
inline Matrix joint_probabilities(const Matrix& conditional) {
    const std::size_t n = conditional.rows();
    Matrix p(n, n);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (conditional(i, j) + conditional(j, i)) / denom;
            p(i, j) = v;
            p(j, i) = v;
        }
    std::vector<char> floored(n * n, 0);
    for (int pass = 0; pass < 8; ++pass) {
        double floor_mass = 0.0;
        double free_mass = 0.0;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                auto& f = floored[i * n + j];
                if (!f && p(i, j) < kTsneFloor) {
                    f = 1;
                    changed = true;
                }
                if (f) {
                    p(i, j) = kTsneFloor;
                    floor_mass += kTsneFloor;
                } else {
                    free_mass += p(i, j);
                }
            }
        if (!changed && pass > 0) break;
        const double scale = (1.0 - floor_mass) / free_mass;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && !floored[i * n + j]) p(i, j) *= scale;
    }
    return p;
}

/// Student-t kernel w_ij = 1/(1+|y_i - y_j|²) and its off-diagonal sum.
inline double student_kernel(const Matrix& y, Matrix& w) {
    const std::size_t n = y.rows();
    w = Matrix(n, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto yi = y.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto yj = y.row(j);
            double dd = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                const double diff = yi[c] - yj[c];
                dd += diff * diff;
            }
            const double v = 1.0 / (1.0 + dd);
            w(i, j) = v;
            w(j, i) = v;
            z += 2.0 * v;
        }
    }
    return z;
}

/// KL(P || Q) with q floored at 1e-12 inside the log.
inline double kl_divergence(const Matrix& p, const Matrix& y) {
    Matrix w;
    const double z = student_kernel(y, w);
    double kl = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double q = std::max(w(i, j) / z, kTsneFloor);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    return kl;
}

/// ∂KL/∂y_i = 4 Σ_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|²)⁻¹.
inline Matrix kl_gradient(const Matrix& p, const Matrix& y, double exaggeration = 1.0) {
    const std::size_t n = y.rows();
    const std::size_t dim = y.cols();
    Matrix w;
    const double z = student_kernel(y, w);
    Matrix grad(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto gi = grad.row(i);
        auto yi = y.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double q = w(i, j) / z;
            const double coef = 4.0 * (exaggeration * p(i, j) - q) * w(i, j);
            auto yj = y.row(j);
            for (std::size_t c = 0; c < dim; ++c) gi[c] += coef * (yi[c] - yj[c]);
        }
    }
    return grad;
}

/// Exact t-SNE.
inline EmbeddingResult fit_tsne(const Matrix& x, std::size_t d, std::uint64_t seed, const TsneOptions& opt = {}) {
    const std::size_t n = x.rows();
    require(d >= 1, ErrorKind::invalid_argument, "t-SNE: n_components must be >= 1");
    const auto dist = pairwise_distances(x);
    const Matrix p = joint_probabilities(conditional_affinities(dist, opt.perplexity));

    RngStream rng(seed, 0);
    Matrix y(n, d);
    for (auto& v : y.data()) v = rng.normal(0.0, opt.init_stddev);
    tie_duplicate_rows(y, dist);

    EmbeddingResult res;
    res.diagnostics.method = Method::tsne;
    res.diagnostics.initial_kl = kl_divergence(p, y);

    Matrix velocity(n, d);
    std::vector<double> gains(n * d, 1.0);
    for (std::size_t it = 0; it < opt.max_iter; ++it) {
        const bool early = it < opt.switch_iter;
        const double momentum = early ? opt.initial_momentum : opt.final_momentum;
        const Matrix grad = kl_gradient(p, y, early ? opt.exaggeration : 1.0);
        auto vel = velocity.data();
        auto yd = y.data();
        auto gd = grad.data();
        for (std::size_t k = 0; k < yd.size(); ++k) {
            // Grow the gain while the gradient keeps opposing the velocity.
            gains[k] = (gd[k] > 0.0) != (vel[k] > 0.0) ? gains[k] + 0.2 : gains[k] * 0.8;
            gains[k] = std::max(gains[k], opt.min_gain);
            vel[k] = momentum * vel[k] - opt.learning_rate * gains[k] * gd[k];
            yd[k] += vel[k];
        }
        center_columns(y);
        res.diagnostics.iterations = it + 1;
    }
    res.diagnostics.kl = kl_divergence(p, y);
    require(all_finite(y), ErrorKind::numerical_failure, "t-SNE produced non-finite coordinates");
    res.coords = std::move(y);
    return res;
}

}  // namespace sfl::manifold
