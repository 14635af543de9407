#include "kpath/cut_kpath.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace kpath {

namespace {

constexpr double kFloorTol = 1e-9;

long long floor_tol(double x) { return static_cast<long long>(std::floor(x + kFloorTol)); }
long long ceil_tol(double x) { return static_cast<long long>(std::ceil(x - kFloorTol)); }

UniversePartition both_blocks(const CutInstance& inst, const CutParams& p) {
    UniversePartition part;
    part.blocks = {inst.left, inst.right};
    part.budgets = {p.lnum, p.rnum};
    part.tradeoffs = {std::max(1.0, p.tunables.c_l), std::max(1.0, p.tunables.c_r)};
    return part;
}

UniversePartition right_block(const CutInstance& inst, const CutParams& p) {
    return UniversePartition::single(inst.right, p.rnum, std::max(1.0, p.tunables.c_prime));
}

}  // namespace

int CutParams::lnumi(int i) const {
    if (i <= 0) return 0;
    return static_cast<int>(floor_tol((1.0 - tunables.zeta) * i * psize));
}

CutParams derive_params(int k, const Tunables& t, const CutOverrides& ov) {
    auto structural = [](const std::string& why) { return InfeasibleParams(why, false); };
    auto too_small = [](const std::string& why) { return InfeasibleParams(why, true); };

    if (k < 1) throw structural("k must be at least 1");
    if (!(t.zeta >= 0.0 && t.zeta < 1.0)) throw structural("zeta must lie in [0, 1)");

    long long m = 0;
    if (ov.m) {
        m = *ov.m;
    } else {
        if (!(t.eps > 0.0 && t.eps < 1.0) || !(t.delta > 0.0 && t.delta < 1.0))
            throw structural("eps and delta must lie in (0, 1)");
        const double ratio = t.delta / t.eps;
        if (ratio > 9e18) throw too_small("m = delta/eps exceeds k");
        m = std::llround(ratio);
        if (std::abs(ratio - static_cast<double>(m)) > 1e-9 * std::max(1.0, ratio))
            throw structural("delta/eps must be an integer (got " + std::to_string(ratio) + ")");
    }
    if (m < 1) throw structural("m must be at least 1");
    if (m + 2 > k) throw too_small("k = " + std::to_string(k) + " leaves no room for m + 2 = " +
                                   std::to_string(m + 2) + " endpoints");

    long long psize = ov.psize ? *ov.psize : ceil_tol(t.eps * k);
    if (psize < 1) throw structural("Psize must be at least 1");
    if (m * psize > k) throw too_small("m * Psize exceeds k");

    const long long first = m * psize;
    long long lnum = ov.lnum ? *ov.lnum : first - floor_tol(t.zeta * static_cast<double>(first));
    long long rnum = ov.rnum ? *ov.rnum : k - 2 - m - lnum;
    if (lnum < 0 || lnum > first) throw structural("Lnum must lie in [0, m * Psize]");

    CutParams p;
    p.k = k;
    p.tunables = t;
    p.m = static_cast<int>(m);
    p.psize = static_cast<int>(psize);
    p.lnum = static_cast<int>(lnum);
    p.rnum = static_cast<int>(rnum);

    if (p.last_internal() < 0)
        throw too_small("final sub-path would need " + std::to_string(p.last_internal()) + " internal vertices");
    if (rnum < 0) throw too_small("Rnum is negative");
    if (rnum < first - lnum) throw structural("Rnum is smaller than the R-share of the first m sub-paths");
    if (p.lnumi(p.m) > p.lnum) throw structural("Lnumi(m) exceeds Lnum");
    return p;
}

CutStats& CutStats::operator+=(const CutStats& o) {
    entries += o.entries;
    raw_members += o.raw_members;
    reduced_members += o.reduced_members;
    max_family = std::max(max_family, o.max_family);
    return *this;
}

Vertex CutInstance::source(int i) const {
    const int m = static_cast<int>(perm.size());
    if (i <= m) return endpoints.at(static_cast<std::size_t>(perm.at(static_cast<std::size_t>(i - 1)) - 1));
    return endpoints.at(static_cast<std::size_t>(m));
}

Vertex CutInstance::target(int i) const {
    const int m = static_cast<int>(perm.size());
    if (i <= m) return endpoints.at(static_cast<std::size_t>(perm.at(static_cast<std::size_t>(i - 1))));
    return endpoints.at(static_cast<std::size_t>(m + 1));
}

bool CutInstance::is_endpoint(Vertex v) const {
    return std::find(endpoints.begin(), endpoints.end(), v) != endpoints.end();
}

void CutInstance::validate(const CutParams& params) const {
    if (!graph) throw ContractError("cut instance has no graph");
    const std::size_t n = graph->num_vertices();
    if (left.capacity() != n || right.capacity() != n) throw ContractError("L/R capacity differs from graph size");
    if (!left.disjoint(right) || (left | right).size() != n) throw ContractError("L and R must partition V");
    const auto m = static_cast<std::size_t>(params.m);
    if (endpoints.size() != m + 2) throw ContractError("V_e must contain m + 2 vertices");
    if (perm.size() != m) throw ContractError("pi must be a permutation of [m]");
    VertexSet seen(n);
    for (Vertex v : endpoints) {
        if (v >= n || seen.contains(v)) throw ContractError("V_e entries must be distinct vertex ids");
        seen.insert(v);
    }
    std::vector<char> hit(m + 1, 0);
    for (int x : perm) {
        if (x < 1 || static_cast<std::size_t>(x) > m || hit[static_cast<std::size_t>(x)])
            throw ContractError("pi must be a permutation of [m]");
        hit[static_cast<std::size_t>(x)] = 1;
    }
}

CutTables::CutTables(const CutInstance& inst, const CutParams& params, CutOptions opts)
    : inst_(inst),
      params_(params),
      opts_(std::move(opts)),
      g_((inst.validate(params), *inst.graph)),
      ve_(inst.graph->num_vertices()),
      both_(both_blocks(inst, params)),
      right_(right_block(inst, params)) {
    for (Vertex v : inst.endpoints) ve_.insert(v);
    const std::size_t n = g_.num_vertices();
    m_.resize(static_cast<std::size_t>(params_.m) * static_cast<std::size_t>(params_.lnum + 1) *
              static_cast<std::size_t>(params_.m * params_.psize + 1) * n);
    k_.resize(static_cast<std::size_t>(std::max(params_.rnum + 1, 1)) * n);
}

std::size_t CutTables::m_index(int i, int jl, int jr, Vertex v) const {
    const auto n = g_.num_vertices();
    const auto jr_dim = static_cast<std::size_t>(params_.m * params_.psize + 1);
    const auto jl_dim = static_cast<std::size_t>(params_.lnum + 1);
    return ((static_cast<std::size_t>(i - 1) * jl_dim + static_cast<std::size_t>(jl)) * jr_dim +
            static_cast<std::size_t>(jr)) * n + v;
}

bool CutTables::m_in_range(int i, int jl, int jr, Vertex v) const {
    const int P = params_.psize;
    if (i < 1 || i > params_.m) return false;
    if (jl < params_.lnumi(i - 1) || jl > std::min(i * P, params_.lnum)) return false;
    const int s = jl + jr;
    if (jr < 0 || jr > params_.rnum || s < 1 + (i - 1) * P || s > i * P) return false;
    if (v >= g_.num_vertices() || ve_.contains(v)) return false;
    if (s == 1 + (i - 1) * P && !g_.out_neighbors(inst_.source(i)).contains(v)) return false;
    if (s == i * P && !g_.in_neighbors(inst_.target(i)).contains(v)) return false;
    return true;
}

bool CutTables::k_in_range(int j, Vertex v) const {
    if (j < k_lower() || j > params_.rnum) return false;
    if (v >= g_.num_vertices() || ve_.contains(v) || !inst_.right.contains(v)) return false;
    const int last = params_.m + 1;
    if (j == k_lower() && !g_.out_neighbors(inst_.source(last)).contains(v)) return false;
    if (j == params_.rnum && !g_.in_neighbors(inst_.target(last)).contains(v)) return false;
    return true;
}

const DPEntry& CutTables::m_entry(int i, int jl, int jr, Vertex v) const {
    if (!m_in_range(i, jl, jr, v)) return empty_;
    return m_[m_index(i, jl, jr, v)];
}

const DPEntry& CutTables::k_entry(int j, Vertex v) const {
    if (!k_in_range(j, v)) return empty_;
    return k_[static_cast<std::size_t>(j) * g_.num_vertices() + v];
}

void CutTables::set_m(int i, int jl, int jr, Vertex v, DPEntry e) {
    if (!m_in_range(i, jl, jr, v)) throw ContractError("M key outside its index range");
    m_[m_index(i, jl, jr, v)] = std::move(e);
}

void CutTables::set_k(int j, Vertex v, DPEntry e) {
    if (!k_in_range(j, v)) throw ContractError("K key outside its index range");
    k_[static_cast<std::size_t>(j) * g_.num_vertices() + v] = std::move(e);
}

namespace {

// Collects A ∪ {v} candidates with provenance, dropping duplicates.
struct RawFamily {
    std::vector<VertexSet> members;
    std::vector<Provenance> provenance;
    std::unordered_map<VertexSet, std::size_t, VertexSetHash> index;

    void add(VertexSet s, const Provenance& p) {
        if (index.emplace(s, members.size()).second) {
            members.push_back(std::move(s));
            provenance.push_back(p);
        }
    }
};

DPEntry reduce(RawFamily raw, const RepresentationKernel& kernel, std::vector<int> profile, bool parallel) {
    DPEntry e;
    e.raw = raw.members.size();
    if (raw.members.empty()) return e;
    for (auto i : kernel.select(raw.members, profile, parallel)) {
        e.members.push_back(std::move(raw.members[i]));
        e.provenance.push_back(raw.provenance[i]);
    }
    return e;
}

}  // namespace

DPEntry CutTables::m_table_step(int i, int jl, int jr, Vertex v) const {
    if (!m_in_range(i, jl, jr, v)) return {};
    const int P = params_.psize;
    const int s = jl + jr;
    const bool in_left = inst_.left.contains(v);
    RawFamily raw;

    if (s == 1) {
        if ((in_left && jl == 1) || (!in_left && jr == 1)) raw.add(g_.empty_set().with(v), Provenance{});
    } else {
        const int pl = in_left ? jl - 1 : jl;
        const int pr = in_left ? jr : jr - 1;
        const bool continues = s > 1 + (i - 1) * P;
        const int pi = continues ? i : i - 1;
        const Vertex via = continues ? v : inst_.target(i - 1);
        if (opts_.access_log) opts_.access_log(s, s - 1);
        for (Vertex u : g_.in_list(via)) {
            if (ve_.contains(u)) continue;
            const DPEntry& pred = m_entry(pi, pl, pr, u);
            for (std::size_t a = 0; a < pred.members.size(); ++a) {
                if (pred.members[a].contains(v)) continue;
                raw.add(pred.members[a].with(v),
                        Provenance{'M', pi, pl, pr, u, static_cast<std::uint32_t>(a)});
            }
        }
    }
    return reduce(std::move(raw), both_, {jl, jr}, opts_.parallel_vectors);
}

DPEntry CutTables::k_table_step(int j, Vertex v) const {
    if (!k_in_range(j, v)) return {};
    RawFamily raw;
    const int scale = params_.lnum;
    if (opts_.access_log) opts_.access_log(scale + j, scale + j - 1);
    if (j > k_lower()) {
        for (Vertex u : g_.in_list(v)) {
            if (ve_.contains(u) || !inst_.right.contains(u)) continue;
            const DPEntry& pred = k_entry(j - 1, u);
            for (std::size_t a = 0; a < pred.members.size(); ++a) {
                if (pred.members[a].contains(v)) continue;
                raw.add(pred.members[a].with(v), Provenance{'K', 0, 0, j - 1, u, static_cast<std::uint32_t>(a)});
            }
        }
    } else {
        const int m = params_.m;
        for (Vertex u : g_.in_list(inst_.target(m))) {
            if (ve_.contains(u)) continue;
            const DPEntry& pred = m_entry(m, params_.lnum, j - 1, u);
            for (std::size_t a = 0; a < pred.members.size(); ++a) {
                if (pred.members[a].contains(v)) continue;
                raw.add((pred.members[a] & inst_.right).with(v),
                        Provenance{'M', m, params_.lnum, j - 1, u, static_cast<std::uint32_t>(a)});
            }
        }
    }
    return reduce(std::move(raw), right_, {j}, opts_.parallel_vectors);
}

// Walks provenance back to a base singleton, appending each entry's vertex to its
// sub-path in reverse order.
void CutTables::chain_from(Provenance p, std::vector<std::vector<Vertex>>& internals) const {
    while (p.table != 0) {
        const DPEntry& e = p.table == 'K' ? k_entry(p.right, p.u) : m_entry(p.stage, p.left, p.right, p.u);
        const int stage = p.table == 'K' ? params_.m + 1 : p.stage;
        internals[static_cast<std::size_t>(stage)].push_back(p.u);
        p = e.provenance.at(p.member);
    }
}

CutResult CutTables::run() {
    CutResult result;
    const int m = params_.m;
    const int P = params_.psize;
    const auto n = static_cast<Vertex>(g_.num_vertices());

    auto account = [&](char table, int stage, int l, int r, Vertex v, const DPEntry& e) {
        if (e.raw == 0) return;
        result.stats.entries += 1;
        result.stats.raw_members += e.raw;
        result.stats.reduced_members += e.members.size();
        result.stats.max_family = std::max<std::uint64_t>(result.stats.max_family, e.members.size());
        if (opts_.trace) opts_.trace->push_back({table, stage, l, r, v, e.raw, e.members.size()});
    };

    for (int i = 1; i <= m; ++i) {
        for (int s = 1 + (i - 1) * P; s <= i * P; ++s) {
            bool level_nonempty = false;
            const int jl_lo = std::max(params_.lnumi(i - 1), s - params_.rnum);
            const int jl_hi = std::min({i * P, params_.lnum, s});
            for (int jl = std::max(jl_lo, 0); jl <= jl_hi; ++jl) {
                for (Vertex v = 0; v < n; ++v) {
                    if (!m_in_range(i, jl, s - jl, v)) continue;
                    DPEntry e = m_table_step(i, jl, s - jl, v);
                    account('M', i, jl, s - jl, v, e);
                    if (e.empty()) continue;
                    level_nonempty = true;
                    m_[m_index(i, jl, s - jl, v)] = std::move(e);
                }
            }
            if (!level_nonempty) return result;
        }
    }

    std::vector<std::vector<Vertex>> internals(static_cast<std::size_t>(m) + 2);
    const Vertex last_s = inst_.source(m + 1), last_t = inst_.target(m + 1);
    bool accepted = false;

    if (params_.last_internal() == 0) {
        // P_{m+1} is a single edge; accept straight from the completed first stage.
        if (g_.has_edge(last_s, last_t)) {
            for (Vertex u : g_.in_list(inst_.target(m))) {
                const DPEntry& e = m_entry(m, params_.lnum, params_.first_stage_right(), u);
                if (e.empty()) continue;
                chain_from(Provenance{'M', m, params_.lnum, params_.first_stage_right(), u, 0}, internals);
                accepted = true;
                break;
            }
        }
    } else {
        for (int j = k_lower(); j <= params_.rnum; ++j) {
            bool level_nonempty = false;
            for (Vertex v = 0; v < n; ++v) {
                if (!k_in_range(j, v)) continue;
                DPEntry e = k_table_step(j, v);
                account('K', 0, 0, j, v, e);
                if (e.empty()) continue;
                level_nonempty = true;
                k_[static_cast<std::size_t>(j) * n + v] = std::move(e);
            }
            if (!level_nonempty) return result;
        }
        for (Vertex v = 0; v < n; ++v) {
            if (k_entry(params_.rnum, v).empty()) continue;
            chain_from(Provenance{'K', 0, 0, params_.rnum, v, 0}, internals);
            accepted = true;
            break;
        }
    }
    if (!accepted) return result;

    result.yes = true;
    for (int i = 1; i <= m + 1; ++i) {
        auto& mid = internals[static_cast<std::size_t>(i)];
        std::vector<Vertex> path{inst_.source(i)};
        path.insert(path.end(), mid.rbegin(), mid.rend());
        path.push_back(inst_.target(i));
        result.paths.push_back(std::move(path));
    }
    if (auto bad = validate_properties(result.paths, inst_, params_); !bad.empty())
        throw std::logic_error("cut k-path witness violates property " + std::to_string(bad.front()));
    return result;
}

CutResult solve_cut(const CutInstance& inst, const CutParams& params, const CutOptions& opts) {
    CutTables tables(inst, params, opts);
    return tables.run();
}

std::vector<int> validate_properties(const std::vector<std::vector<Vertex>>& paths, const CutInstance& inst,
                                     const CutParams& params) {
    const Digraph& g = *inst.graph;
    const int m = params.m;
    if (paths.size() != static_cast<std::size_t>(m) + 1) throw ContractError("expected m + 1 paths");
    for (const auto& p : paths) {
        if (p.empty()) throw ContractError("empty path");
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= g.num_vertices()) throw ContractError("vertex id out of range in path");
            if (i > 0 && !g.has_edge(p[i - 1], p[i])) throw ContractError("path is not a walk in the graph");
        }
    }
    auto internal = [&](std::size_t i) {
        const auto& p = paths[i];
        return p.size() <= 2 ? std::vector<Vertex>{} : std::vector<Vertex>(p.begin() + 1, p.end() - 1);
    };

    std::vector<int> bad;
    auto flag = [&](int prop) {
        if (std::find(bad.begin(), bad.end(), prop) == bad.end()) bad.push_back(prop);
    };

    for (int i = 1; i <= m + 1; ++i) {
        const auto& p = paths[static_cast<std::size_t>(i - 1)];
        if (p.size() < 2 || p.front() != inst.source(i) || p.back() != inst.target(i)) flag(1);
    }
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (Vertex v : internal(i))
            if (inst.is_endpoint(v)) flag(2);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        auto a = internal(i);
        for (std::size_t j = i + 1; j < paths.size(); ++j)
            for (Vertex v : internal(j))
                if (std::find(a.begin(), a.end(), v) != a.end()) flag(3);
    }
    for (int i = 0; i < m; ++i)
        if (internal(static_cast<std::size_t>(i)).size() != static_cast<std::size_t>(params.psize)) flag(4);
    if (static_cast<long long>(internal(static_cast<std::size_t>(m)).size()) != params.last_internal()) flag(5);
    int prefix = 0;
    for (int i = 1; i <= m; ++i) {
        for (Vertex v : internal(static_cast<std::size_t>(i - 1)))
            if (inst.left.contains(v)) ++prefix;
        if (prefix < params.lnumi(i)) flag(6);
    }
    if (prefix != params.lnum) flag(7);
    for (Vertex v : internal(static_cast<std::size_t>(m)))
        if (!inst.right.contains(v)) flag(8);
    std::sort(bad.begin(), bad.end());
    return bad;
}

std::vector<Vertex> assemble_path(const std::vector<std::vector<Vertex>>& paths, const CutInstance& inst) {
    const auto m = inst.perm.size();
    std::vector<const std::vector<Vertex>*> by_position(m + 1, nullptr);
    for (std::size_t i = 0; i < m; ++i) by_position[static_cast<std::size_t>(inst.perm[i] - 1)] = &paths[i];
    by_position[m] = &paths[m];
    std::vector<Vertex> out{inst.endpoints.front()};
    for (const auto* p : by_position) out.insert(out.end(), p->begin() + 1, p->end());
    return out;
}

}  // namespace kpath
