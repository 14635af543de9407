#pragma once

// Shared generators and oracles for the unit and acceptance tests.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "kpath/cut_kpath.hpp"
#include "kpath/graph.hpp"

namespace kpath::testing {

inline Digraph random_digraph(std::size_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && coin(rng)) edges.emplace_back(u, v);
    return Digraph(n, std::move(edges));
}

inline Digraph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
    return Digraph(n, std::move(edges));
}

inline Digraph complete_digraph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v) edges.emplace_back(u, v);
    return Digraph(n, std::move(edges));
}

inline Digraph two_triangles() {
    return Digraph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
}

inline VertexSet random_subset(std::size_t n, std::mt19937_64& rng) {
    VertexSet s(n);
    std::bernoulli_distribution coin(0.5);
    for (Vertex v = 0; v < n; ++v)
        if (coin(rng)) s.insert(v);
    return s;
}

/// Independent oracle for one Cut k-Path instance: depth-first search over tuples of
/// sub-paths P_1..P_{m+1} checking properties 1-8 directly.
inline bool cut_oracle(const CutInstance& inst, const CutParams& params) {
    const Digraph& g = *inst.graph;
    const int m = params.m;
    VertexSet ve(g.num_vertices());
    for (Vertex v : inst.endpoints) ve.insert(v);
    VertexSet used(g.num_vertices());
    int left_total = 0;

    std::function<bool(int)> stage;
    // Extends sub-path i from `at`, `remaining` internal vertices still to place.
    std::function<bool(int, Vertex, int, int)> walk = [&](int i, Vertex at, int remaining, int left_here) -> bool {
        if (remaining == 0) {
            if (!g.has_edge(at, inst.target(i))) return false;
            if (i <= m) {
                const int before = left_total;
                left_total += left_here;
                bool ok = left_total >= params.lnumi(i) && (i < m || left_total == params.lnum) && stage(i + 1);
                left_total = before;
                return ok;
            }
            return true;
        }
        for (Vertex u : g.out_list(at)) {
            if (ve.contains(u) || used.contains(u)) continue;
            if (i == m + 1 && !inst.right.contains(u)) continue;
            used.insert(u);
            bool ok = walk(i, u, remaining - 1, left_here + (inst.left.contains(u) ? 1 : 0));
            used.erase(u);
            if (ok) return true;
        }
        return false;
    };
    stage = [&](int i) -> bool {
        if (i > m + 1) return true;
        const int size = i <= m ? params.psize : params.last_internal();
        return walk(i, inst.source(i), size, 0);
    };
    return stage(1);
}

}  // namespace kpath::testing
