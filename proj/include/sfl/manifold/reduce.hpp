#pragma once

#include <cstddef>
#include <string>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/timer.hpp"
#include "sfl/manifold/isomap.hpp"
#include "sfl/manifold/lle.hpp"
#include "sfl/manifold/mds.hpp"
#include "sfl/manifold/pca.hpp"
#include "sfl/manifold/spectral.hpp"
#include "sfl/manifold/tsne.hpp"
#include "sfl/manifold/types.hpp"

namespace sfl::manifold {

inline void validate(const EmbeddingConfig& cfg, const Matrix& x) {
    const std::size_t n = x.rows();
    require(n >= 3, ErrorKind::invalid_input, "reduction needs at least 3 rows");
    require(cfg.n_components >= 1 && cfg.n_components < x.cols(), ErrorKind::invalid_argument,
            "n_components must be >= 1 and below the input column count (" + std::to_string(cfg.n_components) +
                " vs " + std::to_string(x.cols()) + " columns)");
    if (uses_neighbors(cfg.method))
        require(cfg.neighbors() >= 1 && cfg.neighbors() < n, ErrorKind::invalid_argument,
                "n_neighbors must be in [1, n-1]");
    if (cfg.method == Method::tsne)
        require(cfg.perplexity > 0.0 && 3.0 * cfg.perplexity < static_cast<double>(n - 1),
                ErrorKind::invalid_argument, "perplexity must be below (n-1)/3");
    if (cfg.method == Method::mds) require(cfg.n_init >= 1, ErrorKind::invalid_argument, "n_init must be >= 1");
    require(cfg.tolerance > 0.0, ErrorKind::invalid_argument, "tolerance must be positive");
    require(cfg.lle_regularization > 0.0, ErrorKind::invalid_argument, "lle_regularization must be positive");
}

/// Fit-transform X with the configured method.
inline EmbeddingResult reduce(const Matrix& x, const EmbeddingConfig& cfg) {
    validate(cfg, x);
    require_finite(x, "reduce");
    Stopwatch clock;
    EmbeddingResult r;
    const std::size_t d = cfg.n_components;
    switch (cfg.method) {
    case Method::pca: r = fit_pca(x, d); break;
    case Method::lle: r = fit_lle(x, d, cfg.neighbors(), cfg.lle_regularization); break;
    case Method::se: r = fit_spectral(x, d, cfg.neighbors()); break;
    case Method::mds:
        r = fit_mds_smacof(x, d, cfg.n_init, cfg.iterations(), cfg.tolerance, cfg.seed, cfg.jobs);
        break;
    case Method::iso: r = fit_isomap(x, d, cfg.neighbors(), cfg.jobs); break;
    case Method::tsne: {
        TsneOptions opt;
        opt.perplexity = cfg.perplexity;
        opt.max_iter = cfg.iterations();
        r = fit_tsne(x, d, cfg.seed, opt);
        break;
    }
    }
    r.diagnostics.method = cfg.method;
    r.diagnostics.seconds = clock.seconds();
    require(all_finite(r.coords), ErrorKind::numerical_failure, "reduction produced non-finite coordinates");
    return r;
}

}  // namespace sfl::manifold
