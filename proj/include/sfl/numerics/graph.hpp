#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/parallel.hpp"
#include "sfl/numerics/distance.hpp"

namespace sfl {

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;  // Euclidean distance; 0 only between coincident points

    bool operator==(const Edge&) const = default;
};

struct NeighborGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
    bool symmetrized = false;

    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
        std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
        for (const auto& e : edges) adj[e.from].emplace_back(e.to, e.weight);
        return adj;
    }
};

/// Indices of the k nearest peers of every row, nearest first; distance ties
/// go to the smaller index.
inline std::vector<std::vector<std::size_t>> knn_indices(const DistanceMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    require(k >= 1 && k + 1 <= n, ErrorKind::invalid_argument,
            "k-NN requires 1 <= k <= n-1 (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    std::vector<std::vector<std::size_t>> out(n);
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        cand.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) cand.push_back(j);
        auto row = d.row(i);
        auto closer = [&](std::size_t a, std::size_t b) { return row[a] < row[b] || (row[a] == row[b] && a < b); };
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), closer);
        out[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

/// Directed k-NN graph; with `symmetrize` every edge also appears reversed
/// (union rule) and edges are listed sorted by (from, to).
inline NeighborGraph knn(const DistanceMatrix& d, std::size_t k, bool symmetrize = false) {
    auto nbrs = knn_indices(d, k);
    NeighborGraph g;
    g.n = d.size();
    g.symmetrized = symmetrize;
    if (!symmetrize) {
        for (std::size_t i = 0; i < g.n; ++i)
            for (auto j : nbrs[i]) g.edges.push_back({i, j, d(i, j)});
        return g;
    }
    std::vector<std::vector<std::size_t>> adj(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (auto j : nbrs[i]) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    for (std::size_t i = 0; i < g.n; ++i) {
        std::sort(adj[i].begin(), adj[i].end());
        adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
        for (auto j : adj[i]) g.edges.push_back({i, j, d(i, j)});
    }
    return g;
}

/// First node (in index order) not reachable from node 0, if any.
inline std::optional<std::size_t> first_unreachable(const NeighborGraph& g) {
    if (g.n == 0) return std::nullopt;
    auto adj = g.adjacency();
    std::vector<char> seen(g.n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto [v, w] : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    for (std::size_t i = 0; i < g.n; ++i)
        if (!seen[i]) return i;
    return std::nullopt;
}

inline void require_connected(const NeighborGraph& g) {
    if (auto u = first_unreachable(g))
        fail(ErrorKind::disconnected_graph, "neighborhood graph is disconnected: no path between nodes 0 and " +
                                                std::to_string(*u) + "; increase n_neighbors (k)");
}

/// Geodesic distances by Dijkstra from every source. Sources are independent,
/// so `jobs` only affects speed.
inline DistanceMatrix all_pairs_shortest(const NeighborGraph& g, std::size_t jobs = 1) {
    require(g.symmetrized, ErrorKind::invalid_argument, "all_pairs_shortest needs a symmetrized graph");
    for (const auto& e : g.edges)
        require(e.weight >= 0.0 && e.from != e.to, ErrorKind::invalid_input, "graph edges need nonnegative weights");
    const std::size_t n = g.n;
    const auto adj = g.adjacency();
    constexpr double inf = std::numeric_limits<double>::infinity();
    Matrix dist(n, n, inf);

    parallel_for(n, jobs, [&](std::size_t src) {
        auto row = dist.row(src);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        row[src] = 0.0;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [du, u] = heap.top();
            heap.pop();
            if (du > row[u]) continue;
            for (auto [v, w] : adj[u]) {
                const double nd = du + w;
                if (nd < row[v]) {
                    row[v] = nd;
                    heap.emplace(nd, v);
                }
            }
        }
    });

    DistanceMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::min(dist(i, j), dist(j, i));
            if (v == inf)
                fail(ErrorKind::disconnected_graph, "neighborhood graph is disconnected: no path between nodes " +
                                                        std::to_string(i) + " and " + std::to_string(j) +
                                                        "; increase n_neighbors (k)");
            out.set(i, j, v);
        }
    return out;
}

}  // namespace sfl
