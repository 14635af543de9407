#pragma once

#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpath/vertex_set.hpp"

namespace kpath {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " at line " + std::to_string(line)), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

using Edge = std::pair<Vertex, Vertex>;

/// Immutable directed graph on dense vertex ids [0, n).
/// Edges are kept sorted lexicographically and deduplicated; self-loops are rejected.
class Digraph {
public:
    Digraph() = default;
    Digraph(std::size_t n, std::vector<Edge> edges);

    std::size_t num_vertices() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::span<const Vertex> out_list(Vertex v) const { return out_adj_.at(v); }
    std::span<const Vertex> in_list(Vertex v) const { return in_adj_.at(v); }

    const VertexSet& out_neighbors(Vertex v) const { return out_sets_.at(v); }
    const VertexSet& in_neighbors(Vertex v) const { return in_sets_.at(v); }

    bool has_edge(Vertex u, Vertex v) const { return u < n_ && out_sets_[u].contains(v); }

    VertexSet empty_set() const { return VertexSet(n_); }
    VertexSet all_vertices() const { return VertexSet::full(n_); }

    friend bool operator==(const Digraph& a, const Digraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> out_adj_, in_adj_;
    std::vector<VertexSet> out_sets_, in_sets_;
};

/// Parses the edge-list format: header "n m", then m lines "u v".
/// Blank lines and lines starting with '#' are ignored.
Digraph parse_graph(std::istream& in);
Digraph parse_graph(std::string_view text);
Digraph load_graph(const std::string& path);

/// Canonical rendering: header then edges sorted lexicographically.
std::string render_graph(const Digraph& g);

/// True iff `path` is a simple directed path in g.
bool is_simple_path(const Digraph& g, std::span<const Vertex> path);

}  // namespace kpath
