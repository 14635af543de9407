#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpath/cut_kpath.hpp"
#include "kpath/graph.hpp"
#include "kpath/set_families.hpp"

#include "json.hpp"

namespace kpath {

using Path = std::vector<Vertex>;

struct Endpoints {
    Vertex s;
    Vertex t;
};

/// The outer enumeration would exceed the configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(long double bound)
        : std::runtime_error("search space too large: " + format(bound) + " Cut k-Path instances"),
          bound_(bound) {}
    long double bound() const noexcept { return bound_; }

private:
    static std::string format(long double v);
    long double bound_;
};

/// Lexicographically least simple path on exactly k vertices (respecting endpoints).
std::optional<Path> brute_force_kpath(const Digraph& g, int k, std::optional<Endpoints> ends = std::nullopt);

struct SolveStats {
    std::uint64_t entries = 0;
    std::uint64_t raw_members = 0;
    std::uint64_t reduced_members = 0;
    std::uint64_t max_family = 0;
    std::uint64_t sequences = 0;        // V_e sequences visited (cut mode)
    std::uint64_t cut_instances = 0;    // Cut k-Path runs up to and including the winner
    std::uint64_t family_size = 0;      // |F| of the strict family
    std::string family_backend;
    std::uint64_t modulus = 0;
    bool fallback = false;
    std::string fallback_reason;
    double wall_ms = 0.0;

    void absorb(const CutStats& s);
};

/// Representative-set DP over families P^i_v, each reduced to a (k-i)-representation
/// over universe V. The trade-off constant `c` feeds only the cost model.
std::optional<Path> baseline_kpath(const Digraph& g, int k, double c = kGoldenC,
                                   std::optional<Endpoints> ends = std::nullopt, SolveStats* stats = nullptr);

struct CutSolverOptions {
    long double budget = 1e9L;
    int threads = 1;            // 1 runs the serial reference loop
    bool prune = false;         // skip V_e sequences whose sub-path ends have no usable neighbour
    FamilyOptions family;
    std::vector<EntryTrace>* trace = nullptr;   // serial mode only
};

struct CutSolverResult {
    std::optional<Path> path;
    bool certified = true;
    SolveStats stats;
    /// The accepting Cut k-Path instance and its sub-paths, when a path was found.
    std::optional<CutInstance> instance;
    std::vector<std::vector<Vertex>> subpaths;
};

/// Enumerates V_e sequences (lexicographic), permutations pi (lexicographic) and the
/// strict approximate universal family F (construction order), running solve_cut for
/// each (G, k, L = F, R = V \ F, V_e, pi). Returns the witness earliest in that order.
CutSolverResult cut_solver(const Digraph& g, const CutParams& params, std::optional<Endpoints> ends = std::nullopt,
                           const CutSolverOptions& opts = {});

/// The strict family used by cut_solver: strict (n, m Psize, k-2-m-m Psize, zeta).
UniversalFamily cut_family(std::size_t n, const CutParams& params, const FamilyOptions& opts = {});

enum class Mode { Brute, Baseline, Cut };
Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

struct SolveConfig {
    Tunables tunables;
    CutOverrides overrides;
    std::optional<Endpoints> endpoints;
    CutSolverOptions cut;
};

struct SolveResult {
    bool yes = false;
    std::optional<Path> path;
    Mode mode = Mode::Brute;
    int k = 0;
    std::optional<CutParams> params;
    bool certified = true;
    SolveStats stats;
};

/// Dispatch. In cut mode, parameterizations that fail only because k is small fall
/// back to brute force (stats.fallback); other infeasible parameters propagate.
SolveResult solve(const Digraph& g, int k, Mode mode, const SolveConfig& config = {});

nlohmann::json to_json(const SolveResult& r, bool include_timing = false);

}  // namespace kpath
