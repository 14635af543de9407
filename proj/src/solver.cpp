#include "kpath/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kpath {

std::string BudgetExceeded::format(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6Lg", v);
    return buf;
}

void SolveStats::absorb(const CutStats& s) {
    entries += s.entries;
    raw_members += s.raw_members;
    reduced_members += s.reduced_members;
    max_family = std::max(max_family, s.max_family);
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

struct Dfs {
    const Digraph& g;
    std::size_t k;
    std::optional<Endpoints> ends;
    Path path;
    VertexSet used;

    bool extend() {
        if (path.size() == k) return !ends || path.back() == ends->t;
        for (Vertex u : g.out_list(path.back())) {
            if (used.contains(u)) continue;
            // t may only appear as the final vertex
            if (ends && u == ends->t && path.size() + 1 != k) continue;
            path.push_back(u);
            used.insert(u);
            if (extend()) return true;
            used.erase(u);
            path.pop_back();
        }
        return false;
    }
};

}  // namespace

std::optional<Path> brute_force_kpath(const Digraph& g, int k, std::optional<Endpoints> ends) {
    if (k < 1) throw ContractError("k must be at least 1");
    const std::size_t n = g.num_vertices();
    if (static_cast<std::size_t>(k) > n) return std::nullopt;
    if (ends && (ends->s >= n || ends->t >= n)) throw ContractError("endpoint out of range");
    Dfs dfs{g, static_cast<std::size_t>(k), ends, {}, VertexSet(n)};
    for (Vertex start = 0; start < n; ++start) {
        if (ends && start != ends->s) continue;
        if (ends && k > 1 && start == ends->t) continue;
        dfs.path = {start};
        dfs.used = VertexSet(n);
        dfs.used.insert(start);
        if (dfs.extend()) return dfs.path;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Baseline representative-set DP

std::optional<Path> baseline_kpath(const Digraph& g, int k, double c, std::optional<Endpoints> ends,
                                   SolveStats* stats) {
    if (k < 1) throw ContractError("k must be at least 1");
    if (!(c >= 1.0)) throw ContractError("trade-off constant c must be at least 1");
    const std::size_t n = g.num_vertices();
    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    if (static_cast<std::size_t>(k) > n) return std::nullopt;

    RepresentationKernel kernel(UniversePartition::single(g.all_vertices(), k, c));
    st.modulus = kernel.modulus();

    struct Member {
        VertexSet set;
        Vertex pred;
        std::uint32_t pred_member;
    };
    // layers[i-1][v] holds the reduced family for sets of size i ending at v
    std::vector<std::vector<std::vector<Member>>> layers;
    layers.emplace_back(n);
    for (Vertex v = 0; v < n; ++v) {
        if (ends && v != ends->s) continue;
        layers[0][v].push_back({g.empty_set().with(v), v, 0});
        st.entries += 1;
        st.raw_members += 1;
        st.reduced_members += 1;
        st.max_family = std::max<std::uint64_t>(st.max_family, 1);
    }

    for (int i = 2; i <= k; ++i) {
        const auto& prev = layers.back();
        std::vector<std::vector<Member>> next(n);
        bool any = false;
        for (Vertex v = 0; v < n; ++v) {
            if (ends && v == ends->s) continue;
            if (ends && i < k && v == ends->t) continue;
            std::vector<VertexSet> raw;
            std::vector<std::pair<Vertex, std::uint32_t>> prov;
            std::unordered_set<VertexSet, VertexSetHash> seen;
            for (Vertex u : g.in_list(v)) {
                const auto& fam = prev[u];
                for (std::size_t a = 0; a < fam.size(); ++a) {
                    if (fam[a].set.contains(v)) continue;
                    VertexSet x = fam[a].set.with(v);
                    if (!seen.insert(x).second) continue;
                    raw.push_back(std::move(x));
                    prov.emplace_back(u, static_cast<std::uint32_t>(a));
                }
            }
            if (raw.empty()) continue;
            const int profile[] = {i};
            auto keep = kernel.select(raw, profile);
            st.entries += 1;
            st.raw_members += raw.size();
            st.reduced_members += keep.size();
            st.max_family = std::max<std::uint64_t>(st.max_family, keep.size());
            for (auto idx : keep) next[v].push_back({std::move(raw[idx]), prov[idx].first, prov[idx].second});
            any = true;
        }
        layers.push_back(std::move(next));
        if (!any) return std::nullopt;
    }

    const auto& last = layers.back();
    for (Vertex v = 0; v < n; ++v) {
        if (ends && v != ends->t) continue;
        if (last[v].empty()) continue;
        Path path;
        Vertex cur = v;
        std::uint32_t member = 0;
        for (int i = k; i >= 1; --i) {
            path.push_back(cur);
            const Member& mem = layers[static_cast<std::size_t>(i - 1)][cur][member];
            cur = mem.pred;
            member = mem.pred_member;
        }
        std::reverse(path.begin(), path.end());
        if (!is_simple_path(g, path) || path.size() != static_cast<std::size_t>(k))
            throw std::logic_error("baseline witness is not a simple k-path");
        return path;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cut solver

UniversalFamily cut_family(std::size_t n, const CutParams& params, const FamilyOptions& opts) {
    const auto p = static_cast<std::size_t>(params.m * params.psize);
    const auto q = static_cast<std::size_t>(params.last_internal());
    const double zeta = params.tunables.zeta;
    UniversalFamily fam = zeta > 0.0 ? approx_universal_family(n, p, q, zeta, opts) : universal_family(n, p, q, opts);
    // With zero slack every member already misses exactly floor(zeta p) = 0 elements.
    if (fam.slack > 0) fam.sets = strictify(fam.sets, n);
    return fam;
}

namespace {

/// Ordered sequences of distinct vertices, lexicographic. Positions listed in `fixed`
/// hold a prescribed vertex.
class SequenceEnumerator {
public:
    SequenceEnumerator(std::size_t n, std::size_t len, std::vector<std::optional<Vertex>> fixed)
        : n_(n), len_(len), fixed_(std::move(fixed)), cur_(len), used_(n, 0) {
        for (const auto& f : fixed_)
            if (f) {
                if (used_[*f]) exhausted_ = true;
                used_[*f] = 1;
            }
    }

    bool next(std::vector<Vertex>& out) {
        if (exhausted_) return false;
        if (!started_) {
            started_ = true;
            if (!fill_from(0)) return exhausted_ = true, false;
        } else if (!advance()) {
            return exhausted_ = true, false;
        }
        out = cur_;
        return true;
    }

private:
    // Assigns the smallest free vertices to positions [pos, len).
    bool fill_from(std::size_t pos) {
        for (std::size_t i = pos; i < len_; ++i) {
            if (fixed_[i]) {
                cur_[i] = *fixed_[i];
                continue;
            }
            if (!place(i, 0)) {
                // roll back to let advance() try a larger value upstream
                for (std::size_t j = pos; j < i; ++j)
                    if (!fixed_[j]) used_[cur_[j]] = 0;
                return false;
            }
        }
        return true;
    }
    bool place(std::size_t i, Vertex from) {
        for (Vertex v = from; v < n_; ++v)
            if (!used_[v]) {
                cur_[i] = v;
                used_[v] = 1;
                return true;
            }
        return false;
    }
    bool advance() {
        for (std::size_t i = len_; i-- > 0;) {
            if (fixed_[i]) continue;
            used_[cur_[i]] = 0;
            for (Vertex v = cur_[i] + 1; v < n_; ++v) {
                if (used_[v]) continue;
                cur_[i] = v;
                used_[v] = 1;
                if (fill_from(i + 1)) return true;
                used_[v] = 0;
            }
            // position i free again; keep backtracking
        }
        return false;
    }

    std::size_t n_, len_;
    std::vector<std::optional<Vertex>> fixed_;
    std::vector<Vertex> cur_;
    std::vector<char> used_;
    bool started_ = false;
    bool exhausted_ = false;
};

bool viable_sequence(const Digraph& g, const CutParams& params, const std::vector<Vertex>& seq) {
    VertexSet ve(g.num_vertices());
    for (Vertex v : seq) ve.insert(v);
    auto has_out = [&](Vertex v) { return !(g.out_neighbors(v) - ve).empty(); };
    auto has_in = [&](Vertex v) { return !(g.in_neighbors(v) - ve).empty(); };
    const auto m = static_cast<std::size_t>(params.m);
    for (std::size_t j = 0; j < m; ++j)
        if (!has_out(seq[j]) || !has_in(seq[j + 1])) return false;
    if (params.last_internal() == 0) return g.has_edge(seq[m], seq[m + 1]);
    return has_out(seq[m]) && has_in(seq[m + 1]);
}

std::vector<std::vector<int>> all_permutations(int m) {
    std::vector<int> p(static_cast<std::size_t>(m));
    std::iota(p.begin(), p.end(), 1);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

struct Task {
    std::size_t seq;
    std::size_t perm;
    std::size_t fam;
};

Path finish_witness(const Digraph& g, const CutParams& params, const CutInstance& inst,
                    const std::vector<std::vector<Vertex>>& paths) {
    Path path = assemble_path(paths, inst);
    if (path.size() != static_cast<std::size_t>(params.k) || !is_simple_path(g, path))
        throw std::logic_error("cut solver witness is not a simple k-path");
    return path;
}

}  // namespace

CutSolverResult cut_solver(const Digraph& g, const CutParams& params, std::optional<Endpoints> ends,
                           const CutSolverOptions& opts) {
    CutSolverResult out;
    const std::size_t n = g.num_vertices();
    const auto m = static_cast<std::size_t>(params.m);
    if (ends && (ends->s >= n || ends->t >= n)) throw ContractError("endpoint out of range");
    if (static_cast<std::size_t>(params.k) > n || n < m + 2) return out;
    if (ends && ends->s == ends->t) return out;

    UniversalFamily fam = cut_family(n, params, opts.family);
    out.certified = fam.certified;
    out.stats.family_size = fam.sets.size();
    out.stats.family_backend = fam.backend;
    out.stats.modulus = field_modulus_for(n);

    const auto perms = all_permutations(params.m);
    long double bound = std::pow(static_cast<long double>(n), static_cast<long double>(ends ? m : m + 2)) *
                        static_cast<long double>(perms.size()) * static_cast<long double>(fam.sets.size());
    if (bound > opts.budget) throw BudgetExceeded(bound);

    std::vector<std::optional<Vertex>> fixed(m + 2);
    if (ends) {
        fixed.front() = ends->s;
        fixed.back() = ends->t;
    }
    SequenceEnumerator seqs(n, m + 2, fixed);

    std::vector<CutInstance> instances_by_family;   // L/R per family member, reused
    instances_by_family.reserve(fam.sets.size());
    for (const auto& f : fam.sets) {
        CutInstance inst;
        inst.graph = &g;
        inst.left = f;
        inst.right = f.complement();
        instances_by_family.push_back(std::move(inst));
    }
    auto make_instance = [&](const std::vector<Vertex>& seq, std::size_t p, std::size_t f) {
        CutInstance inst = instances_by_family[f];
        inst.endpoints = seq;
        inst.perm = perms[p];
        return inst;
    };

    CutOptions cut_opts;
    const int threads = std::max(1, opts.threads);

    if (threads == 1) {
        cut_opts.trace = opts.trace;
        std::vector<Vertex> seq;
        while (seqs.next(seq)) {
            ++out.stats.sequences;
            if (opts.prune && !viable_sequence(g, params, seq)) continue;
            for (std::size_t p = 0; p < perms.size(); ++p) {
                for (std::size_t f = 0; f < fam.sets.size(); ++f) {
                    CutInstance inst = make_instance(seq, p, f);
                    CutResult r = solve_cut(inst, params, cut_opts);
                    ++out.stats.cut_instances;
                    out.stats.absorb(r.stats);
                    if (r.yes) {
                        out.path = finish_witness(g, params, inst, r.paths);
                        out.instance = std::move(inst);
                        out.subpaths = std::move(r.paths);
                        return out;
                    }
                }
            }
        }
        return out;
    }

    // Parallel: chunks of sequences are flattened into (seq, perm, family) tasks; the
    // reported witness is the one with the smallest task index, and statistics cover
    // exactly the tasks up to it, so the output matches the serial loop.
    constexpr std::size_t kChunk = 64;
    const std::size_t per_seq = perms.size() * fam.sets.size();
    std::vector<std::vector<Vertex>> chunk;
    std::vector<char> viable;
    while (true) {
        chunk.clear();
        viable.clear();
        std::vector<Vertex> seq;
        while (chunk.size() < kChunk && seqs.next(seq)) {
            viable.push_back(!opts.prune || viable_sequence(g, params, seq));
            chunk.push_back(seq);
        }
        if (chunk.empty()) break;

        const std::size_t total = chunk.size() * per_seq;
        std::vector<CutStats> task_stats(total);
        std::vector<char> ran(total, 0);
        std::vector<std::vector<std::vector<Vertex>>> witness(total);
        std::atomic<long long> best{static_cast<long long>(total)};
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long long t = 0; t < static_cast<long long>(total); ++t) {
            if (t > best.load(std::memory_order_relaxed)) continue;
            const auto ti = static_cast<std::size_t>(t);
            const std::size_t s = ti / per_seq, p = (ti % per_seq) / fam.sets.size(), f = ti % fam.sets.size();
            if (!viable[s]) continue;
            try {
                CutInstance inst = make_instance(chunk[s], p, f);
                CutResult r = solve_cut(inst, params, cut_opts);
                task_stats[ti] = r.stats;
                ran[ti] = 1;
                if (r.yes) {
                    witness[ti] = std::move(r.paths);
                    long long cur = best.load();
                    while (t < cur && !best.compare_exchange_weak(cur, t)) {
                    }
                }
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        const auto winner = static_cast<std::size_t>(best.load());
        const std::size_t last = std::min(winner, total - 1);
        for (std::size_t t = 0; t <= last; ++t) {
            if (!ran[t]) continue;
            ++out.stats.cut_instances;
            out.stats.absorb(task_stats[t]);
        }
        if (winner < total) {
            out.stats.sequences += winner / per_seq + 1;
            const std::size_t s = winner / per_seq, p = (winner % per_seq) / fam.sets.size(),
                              f = winner % fam.sets.size();
            CutInstance inst = make_instance(chunk[s], p, f);
            out.path = finish_witness(g, params, inst, witness[winner]);
            out.instance = std::move(inst);
            out.subpaths = std::move(witness[winner]);
            return out;
        }
        out.stats.sequences += chunk.size();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

Mode parse_mode(const std::string& name) {
    if (name == "brute") return Mode::Brute;
    if (name == "baseline") return Mode::Baseline;
    if (name == "cut") return Mode::Cut;
    throw std::invalid_argument("unknown mode '" + name + "' (expected brute, baseline or cut)");
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Brute: return "brute";
        case Mode::Baseline: return "baseline";
        case Mode::Cut: return "cut";
    }
    return "?";
}

SolveResult solve(const Digraph& g, int k, Mode mode, const SolveConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    SolveResult r;
    r.mode = mode;
    r.k = k;
    switch (mode) {
        case Mode::Brute:
            r.path = brute_force_kpath(g, k, config.endpoints);
            break;
        case Mode::Baseline:
            r.path = baseline_kpath(g, k, std::max(1.0, config.tunables.c_prime), config.endpoints, &r.stats);
            break;
        case Mode::Cut: {
            std::optional<CutParams> params;
            try {
                params = derive_params(k, config.tunables, config.overrides);
            } catch (const InfeasibleParams& e) {
                if (!e.too_small()) throw;
                r.stats.fallback = true;
                r.stats.fallback_reason = e.what();
            }
            if (params) {
                r.params = params;
                CutSolverResult c = cut_solver(g, *params, config.endpoints, config.cut);
                r.path = std::move(c.path);
                r.certified = c.certified;
                r.stats = std::move(c.stats);
            } else {
                r.path = brute_force_kpath(g, k, config.endpoints);
            }
            break;
        }
    }
    r.yes = r.path.has_value();
    r.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

nlohmann::json to_json(const SolveResult& r, bool include_timing) {
    nlohmann::json j;
    j["answer"] = r.yes ? "yes" : "no";
    j["path"] = r.path ? nlohmann::json(*r.path) : nlohmann::json(nullptr);
    j["mode"] = mode_name(r.mode);
    nlohmann::json params{{"k", r.k}};
    if (r.params) {
        const auto& p = *r.params;
        params["eps"] = p.tunables.eps;
        params["delta"] = p.tunables.delta;
        params["zeta"] = p.tunables.zeta;
        params["cl"] = p.tunables.c_l;
        params["cr"] = p.tunables.c_r;
        params["cprime"] = p.tunables.c_prime;
        params["m"] = p.m;
        params["psize"] = p.psize;
        params["lnum"] = p.lnum;
        params["rnum"] = p.rnum;
        std::vector<int> lnumi;
        for (int i = 1; i <= p.m; ++i) lnumi.push_back(p.lnumi(i));
        params["lnumi"] = lnumi;
    }
    j["params"] = params;
    const auto& s = r.stats;
    nlohmann::json stats{{"entries", s.entries},
                         {"raw_members", s.raw_members},
                         {"reduced_members", s.reduced_members},
                         {"max_family", s.max_family}};
    if (r.mode == Mode::Cut) {
        stats["sequences"] = s.sequences;
        stats["cut_instances"] = s.cut_instances;
        stats["family_size"] = s.family_size;
        stats["family_backend"] = s.family_backend;
        stats["fallback"] = s.fallback;
        if (s.fallback) stats["fallback_reason"] = s.fallback_reason;
    }
    if (s.modulus) stats["modulus"] = s.modulus;
    if (include_timing) stats["wall_ms"] = s.wall_ms;
    j["stats"] = stats;
    j["certified"] = r.certified;
    return j;
}

}  // namespace kpath
