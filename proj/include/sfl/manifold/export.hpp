#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/manifold/types.hpp"

namespace sfl::manifold {

inline std::vector<std::string> coordinate_header(std::size_t d) {
    std::vector<std::string> h;
    for (std::size_t j = 0; j < d; ++j) h.push_back("dim_" + std::to_string(j));
    return h;
}

/// Coordinates as CSV with header dim_0..dim_{d-1}.
inline std::string coords_csv(const EmbeddingResult& r) {
    return csv::write_matrix(coordinate_header(r.coords.cols()), r.coords);
}

inline nlohmann::json config_json(const EmbeddingConfig& cfg) {
    return {{"method", method_name(cfg.method)},
            {"n_components", cfg.n_components},
            {"n_neighbors", cfg.neighbors()},
            {"perplexity", cfg.perplexity},
            {"seed", cfg.seed},
            {"max_iter", cfg.iterations()},
            {"n_init", cfg.n_init},
            {"tolerance", cfg.tolerance},
            {"lle_regularization", cfg.lle_regularization}};
}

inline nlohmann::json optional_number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

/// Sidecar describing how an embedding was produced. `with_timing` controls
/// the wall-clock field so reproducibility checks can hash the rest.
inline nlohmann::json diagnostics_json(const EmbeddingConfig& cfg, const EmbeddingResult& r, bool with_timing = true) {
    const auto& d = r.diagnostics;
    nlohmann::json j{{"method", method_name(cfg.method)},
                     {"hyperparameters", config_json(cfg)},
                     {"rows", r.coords.rows()},
                     {"stress", optional_number(d.stress)},
                     {"kl", optional_number(d.kl)},
                     {"initial_kl", optional_number(d.initial_kl)},
                     {"spectrum", d.spectrum},
                     {"iterations", d.iterations}};
    if (cfg.method == Method::mds) j["best_restart"] = d.best_restart;
    if (with_timing) j["seconds"] = d.seconds;
    return j;
}

}  // namespace sfl::manifold
