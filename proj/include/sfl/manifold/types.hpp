#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl::manifold {

enum class Method { lle, se, mds, iso, tsne, pca };

inline constexpr Method all_methods[] = {Method::lle, Method::se, Method::mds, Method::iso, Method::tsne, Method::pca};

inline std::string_view method_name(Method m) noexcept {
    switch (m) {
    case Method::lle: return "LLE";
    case Method::se: return "SE";
    case Method::mds: return "MDS";
    case Method::iso: return "ISO";
    case Method::tsne: return "t-SNE";
    case Method::pca: return "PCA";
    }
    return "?";
}

/// Accepts the display names above case-insensitively, plus "tsne".
inline Method parse_method(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != '-' && c != '_') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "lle") return Method::lle;
    if (s == "se" || s == "spectral") return Method::se;
    if (s == "mds") return Method::mds;
    if (s == "iso" || s == "isomap") return Method::iso;
    if (s == "tsne") return Method::tsne;
    if (s == "pca") return Method::pca;
    fail(ErrorKind::invalid_argument, "unknown reduction method '" + std::string(text) + "'");
}

/// Neighbor counts used when the config leaves n_neighbors at 0.
inline std::size_t default_neighbors(Method m) noexcept {
    switch (m) {
    case Method::lle: return 10;
    case Method::se: return 5;
    case Method::iso: return 10;
    default: return 0;
    }
}

inline bool uses_neighbors(Method m) noexcept { return m == Method::lle || m == Method::se || m == Method::iso; }

struct EmbeddingConfig {
    Method method = Method::pca;
    std::size_t n_components = 2;
    std::size_t n_neighbors = 0;  // 0: method default
    double perplexity = 30.0;
    std::uint64_t seed = 42;
    std::size_t max_iter = 0;  // 0: MDS 300, t-SNE 1000
    std::size_t n_init = 4;
    double tolerance = 1e-6;
    double lle_regularization = 1e-3;
    std::size_t jobs = 1;  // internal parallelism only; results do not depend on it

    std::size_t neighbors() const noexcept { return n_neighbors ? n_neighbors : default_neighbors(method); }
    std::size_t iterations() const noexcept {
        if (max_iter) return max_iter;
        return method == Method::tsne ? 1000 : 300;
    }
};

struct EmbeddingDiagnostics {
    Method method = Method::pca;
    std::vector<double> spectrum;  // PCA/ISO: descending; LLE/SE: ascending
    double stress = std::numeric_limits<double>::quiet_NaN();
    double kl = std::numeric_limits<double>::quiet_NaN();
    double initial_kl = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> stress_history;  // MDS, one per restart
    std::size_t best_restart = 0;
    std::size_t iterations = 0;
    double seconds = 0.0;
};

struct EmbeddingResult {
    Matrix coords;
    EmbeddingDiagnostics diagnostics;
};

/// Gives rows with identical content the coordinates of their first
/// occurrence. Used on random initializations so coincident inputs stay
/// coincident through the optimization.
template <typename DistanceLike>
void tie_duplicate_rows(Matrix& init, const DistanceLike& d) {
    const std::size_t n = init.rows();
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (d(i, j) == 0.0) {
                std::copy_n(init.row(j).begin(), init.cols(), init.row(i).begin());
                break;
            }
}

/// First-occurrence representative of every row (rows at distance 0 are
/// coincident) plus the list of distinct representatives.
struct RowClasses {
    std::vector<std::size_t> representative;
    std::vector<std::size_t> unique;
    bool has_duplicates() const noexcept { return unique.size() != representative.size(); }
};

template <typename DistanceLike>
RowClasses coincident_rows(const DistanceLike& d, std::size_t n) {
    RowClasses rc;
    rc.representative.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rc.representative[i] = i;
        for (std::size_t j = 0; j < i; ++j)
            if (d(i, j) == 0.0) {
                rc.representative[i] = rc.representative[j];
                break;
            }
        if (rc.representative[i] == i) rc.unique.push_back(i);
    }
    return rc;
}

/// Expands coordinates of the distinct rows back to every input row.
inline Matrix broadcast_rows(const Matrix& unique_coords, const RowClasses& rc) {
    std::vector<std::size_t> slot(rc.representative.size(), 0);
    for (std::size_t u = 0; u < rc.unique.size(); ++u) slot[rc.unique[u]] = u;
    Matrix out(rc.representative.size(), unique_coords.cols());
    for (std::size_t i = 0; i < out.rows(); ++i)
        std::copy_n(unique_coords.row(slot[rc.representative[i]]).begin(), out.cols(), out.row(i).begin());
    return out;
}

}  // namespace sfl::manifold
