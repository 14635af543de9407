#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpath/graph.hpp"
#include "kpath/set_families.hpp"

namespace kpath {

/// Raised by derive_params. `too_small` marks parameterizations that only fail
/// because k is small relative to m and Psize; the top-level solver falls back to
/// brute force for those and reports everything else as an error.
class InfeasibleParams : public std::runtime_error {
public:
    InfeasibleParams(const std::string& why, bool too_small)
        : std::runtime_error("infeasible parameterization: " + why), too_small_(too_small) {}
    bool too_small() const noexcept { return too_small_; }

private:
    bool too_small_;
};

inline const double kGoldenC = 1.0 + 1.0 / 2.2360679774997896964;   // 1 + 1/sqrt(5)

struct Tunables {
    double eps = 0.5;
    double delta = 0.5;
    double zeta = 0.5;
    double c_l = 1.136;
    double c_r = 1.645;
    double c_prime = kGoldenC;
};

/// Production constants from the analysis. m = delta/eps is astronomically large.
inline Tunables production_tunables() { return {1e-10, 0.49533, 0.712, 1.136, 1.645, kGoldenC}; }

/// Direct injection of derived quantities, bypassing the defining formulas.
struct CutOverrides {
    std::optional<long long> m;
    std::optional<long long> psize;
    std::optional<long long> lnum;
    std::optional<long long> rnum;
};

struct CutParams {
    int k = 0;
    Tunables tunables;
    int m = 0;
    int psize = 0;
    int lnum = 0;
    int rnum = 0;

    /// Lower bound on internal L-vertices among the first i sub-paths: floor((1-zeta) i Psize).
    int lnumi(int i) const;
    /// Internal vertex count of the final sub-path: k - 2 - m - m Psize.
    int last_internal() const { return k - 2 - m - m * psize; }
    /// R-vertices contributed by the first m sub-paths: m Psize - Lnum.
    int first_stage_right() const { return m * psize - lnum; }
};

CutParams derive_params(int k, const Tunables& tunables, const CutOverrides& overrides = {});

/// One Cut k-Path instance. Sub-paths are numbered 1..m+1 in table order; sub-path
/// i <= m runs from v_{pi(i)} to v_{pi(i)+1}, sub-path m+1 from v_{m+1} to v_{m+2}.
struct CutInstance {
    const Digraph* graph = nullptr;
    VertexSet left, right;
    std::vector<Vertex> endpoints;      // v_1..v_{m+2}
    std::vector<int> perm;              // perm[i-1] = pi(i), values in [1, m]

    /// s_i and t_i for 1 <= i <= m+1.
    Vertex source(int i) const;
    Vertex target(int i) const;
    bool is_endpoint(Vertex v) const;
    /// Throws ContractError when L/R do not partition V, V_e repeats, or pi is not a bijection.
    void validate(const CutParams& params) const;
};

struct EntryTrace {
    char table;                 // 'M' or 'K'
    int stage, left, right;     // M: (i, j_l, j_r); K: (0, 0, j)
    Vertex v;
    std::size_t raw, reduced;
};

struct CutStats {
    std::uint64_t entries = 0;          // entries with a nonempty raw family
    std::uint64_t raw_members = 0;
    std::uint64_t reduced_members = 0;
    std::uint64_t max_family = 0;

    CutStats& operator+=(const CutStats& o);
};

struct CutOptions {
    bool parallel_vectors = false;
    std::vector<EntryTrace>* trace = nullptr;
    /// Receives (combined size of the entry being built, combined size of the entry read).
    /// K entries count Lnum + j so both tables share one scale.
    std::function<void(int, int)> access_log;
};

struct CutResult {
    bool yes = false;
    std::vector<std::vector<Vertex>> paths;   // P_1..P_{m+1} in table order
    CutStats stats;
};

/// Where a family member came from: the entry and member it extended.
struct Provenance {
    char table = 0;             // 'M', 'K', or 0 for a base-case singleton
    int stage = 0, left = 0, right = 0;
    Vertex u = 0;
    std::uint32_t member = 0;
};

struct DPEntry {
    std::vector<VertexSet> members;
    std::vector<Provenance> provenance;
    std::size_t raw = 0;        // size before reduction
    bool empty() const { return members.empty(); }
};

/// Tables M[i, j_l, j_r, v] and K[j, v]. Lookups outside the index ranges yield the
/// empty entry. Entries are filled level by level: every entry of combined size s
/// reads only entries of size s - 1.
class CutTables {
public:
    CutTables(const CutInstance& inst, const CutParams& params, CutOptions opts = {});

    bool m_in_range(int i, int jl, int jr, Vertex v) const;
    bool k_in_range(int j, Vertex v) const;
    int k_lower() const { return 1 + params_.m * params_.psize - params_.lnum; }

    const DPEntry& m_entry(int i, int jl, int jr, Vertex v) const;
    const DPEntry& k_entry(int j, Vertex v) const;

    /// Raw family per the matching recurrence, then reduced to the
    /// (Lnum - j_l, Rnum - j_r)-representation over blocks (L, R).
    DPEntry m_table_step(int i, int jl, int jr, Vertex v) const;
    /// Raw family per the stage-two recurrence, reduced over universe R with budget Rnum.
    DPEntry k_table_step(int j, Vertex v) const;

    void set_m(int i, int jl, int jr, Vertex v, DPEntry e);
    void set_k(int j, Vertex v, DPEntry e);

    /// Fills both tables and decides the instance, reconstructing the witness on "yes".
    CutResult run();

    std::uint64_t modulus() const { return both_.modulus(); }

private:
    std::size_t m_index(int i, int jl, int jr, Vertex v) const;
    void chain_from(Provenance p, std::vector<std::vector<Vertex>>& internals) const;

    const CutInstance& inst_;
    CutParams params_;
    CutOptions opts_;
    const Digraph& g_;
    VertexSet ve_;
    RepresentationKernel both_;     // blocks (L, R), budgets (Lnum, Rnum)
    RepresentationKernel right_;    // universe R, budget Rnum
    std::vector<DPEntry> m_;
    std::vector<DPEntry> k_;
    DPEntry empty_;
};

CutResult solve_cut(const CutInstance& inst, const CutParams& params, const CutOptions& opts = {});

/// Violated property numbers (1..8) for paths P_1..P_{m+1}; empty when all hold.
/// Throws ContractError if a path is not a walk in the graph.
std::vector<int> validate_properties(const std::vector<std::vector<Vertex>>& paths, const CutInstance& inst,
                                     const CutParams& params);

/// The k-vertex path P_{pi^-1(1)}, ..., P_{pi^-1(m)}, P_{m+1} glued at shared endpoints.
std::vector<Vertex> assemble_path(const std::vector<std::vector<Vertex>>& paths, const CutInstance& inst);

}  // namespace kpath
