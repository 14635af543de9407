#include "kpath/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace kpath {

std::string VertexSet::to_string() const {
    std::string out;
    for_each([&](Vertex v) {
        if (!out.empty()) out += ' ';
        out += std::to_string(v);
    });
    return out;
}

Digraph::Digraph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw ContractError("edge endpoint out of range");
        if (u == v) throw ContractError("self-loop on vertex " + std::to_string(u));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    out_adj_.assign(n, {});
    in_adj_.assign(n, {});
    out_sets_.assign(n, VertexSet(n));
    in_sets_.assign(n, VertexSet(n));
    for (const auto& [u, v] : edges_) {
        out_adj_[u].push_back(v);
        in_adj_[v].push_back(u);
        out_sets_[u].insert(v);
        in_sets_[v].insert(u);
    }
    for (auto& l : in_adj_) std::sort(l.begin(), l.end());
}

namespace {

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Reads exactly `count` non-negative integers from `line`.
bool read_ints(std::string_view line, long long* out, int count) {
    std::size_t pos = 0;
    for (int i = 0; i < count; ++i) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) return false;
        auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), out[i]);
        if (ec != std::errc{}) return false;
        pos = static_cast<std::size_t>(ptr - line.data());
        if (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r')
            return false;
    }
    return is_blank(line.substr(pos));
}

}  // namespace

Digraph parse_graph(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    long long n = 0, m = 0;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line) || line.front() == '#') continue;
        long long vals[2];
        if (!read_ints(line, vals, 2)) {
            throw ParseError(have_header ? "malformed edge line" : "malformed header line", lineno);
        }
        if (!have_header) {
            if (vals[0] < 0 || vals[1] < 0) throw ParseError("negative count", lineno);
            n = vals[0];
            m = vals[1];
            have_header = true;
            edges.reserve(static_cast<std::size_t>(m));
            continue;
        }
        if (static_cast<long long>(edges.size()) >= m) throw ParseError("more edges than declared", lineno);
        if (vals[0] < 0 || vals[1] < 0 || vals[0] >= n || vals[1] >= n)
            throw ParseError("vertex id out of range", lineno);
        if (vals[0] == vals[1]) throw ParseError("self-loop", lineno);
        edges.emplace_back(static_cast<Vertex>(vals[0]), static_cast<Vertex>(vals[1]));
    }
    if (!have_header) throw ParseError("missing header", lineno + 1);
    if (static_cast<long long>(edges.size()) != m)
        throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(edges.size()),
                         lineno + 1);
    return Digraph(static_cast<std::size_t>(n), std::move(edges));
}

Digraph parse_graph(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_graph(in);
}

Digraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
    return parse_graph(in);
}

std::string render_graph(const Digraph& g) {
    std::ostringstream out;
    out << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

bool is_simple_path(const Digraph& g, std::span<const Vertex> path) {
    if (path.empty()) return false;
    VertexSet seen(g.num_vertices());
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] >= g.num_vertices() || seen.contains(path[i])) return false;
        seen.insert(path[i]);
        if (i > 0 && !g.has_edge(path[i - 1], path[i])) return false;
    }
    return true;
}

}  // namespace kpath
