#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpath/vertex_set.hpp"

namespace kpath {

/// Raised by the exhaustive verifiers when an instance exceeds the enumeration cap.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded() : std::runtime_error("instance too large for exhaustive verification") {}
};

inline constexpr std::uint64_t kDefaultVerifyCap = 5'000'000;

/// Disjoint blocks U_1..U_t with budgets k_1..k_t and trade-off constants c_1..c_t.
/// The constants are carried for the cost model only; the kernel ignores them.
struct UniversePartition {
    std::vector<VertexSet> blocks;
    std::vector<int> budgets;
    std::vector<double> tradeoffs;

    static UniversePartition single(VertexSet universe, int budget, double c = 1.0);
    /// Checks disjointness, k_i >= 0 and c_i >= 1; throws ContractError.
    void validate() const;
    std::size_t capacity() const { return blocks.empty() ? 0 : blocks.front().capacity(); }
    VertexSet universe() const;
};

/// Members share the per-block cardinality profile p_1..p_t.
struct SetFamily {
    std::vector<VertexSet> members;
    std::vector<int> profile;
};

/// Exterior-algebra representative-set kernel for a direct sum of uniform matroids.
///
/// Block i is represented by the k_i x |U_i| Vandermonde matrix over GF(P) with
/// vertex v mapped to v+1. A member A maps to the vector of its p x p minors; with
/// columns grouped by block only row selections taking p_i rows from block i can be
/// nonzero, so the vector is the tensor product of per-block minor vectors and has
/// length prod C(k_i, p_i). Selected members form a maximal independent subset,
/// found by elimination in input order.
class RepresentationKernel {
public:
    explicit RepresentationKernel(UniversePartition partition);

    const UniversePartition& partition() const noexcept { return part_; }
    std::uint64_t modulus() const noexcept { return modulus_; }

    /// Indices into `members` of the kept sets, ascending. Throws ContractError on a
    /// profile mismatch or p_i > k_i. `parallel` only affects how the minor vectors
    /// are computed; the result is identical.
    std::vector<std::size_t> select(std::span<const VertexSet> members, std::span<const int> profile,
                                    bool parallel = false) const;

    /// Coordinates of one member (exposed for tests).
    std::vector<std::uint32_t> minor_vector(const VertexSet& member, std::span<const int> profile) const;

private:
    UniversePartition part_;
    std::uint64_t modulus_;
    std::vector<int> block_of_;                        // vertex -> block index or -1
    std::vector<std::vector<std::uint32_t>> powers_;   // vertex -> (v+1)^r, r < k_block
};

/// Smallest prime strictly greater than max(n, 257).
std::uint64_t field_modulus_for(std::size_t n);

/// (k_1-p_1,...,k_t-p_t)-representative subfamily. Duplicates are dropped first.
SetFamily rep_family(const SetFamily& family, const UniversePartition& partition);

struct VerifyOutcome {
    bool holds = true;
    std::optional<VertexSet> witness_b;   // failing blocker B (representation)
    std::optional<VertexSet> witness_a;   // failing A (universal families)
    std::string message;
};

/// Direct check of the representation property by enumerating every admissible B.
VerifyOutcome verify_representation(const SetFamily& family, const SetFamily& candidate,
                                    const UniversePartition& partition,
                                    std::uint64_t cap = kDefaultVerifyCap);

struct ApproxUFParams {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    double zeta = 0.0;
    double x = 0.0;
    double eta = 1.0;
    double size_bound = 1.0;
};

/// Inclusion bias x, eta and the size expression 1/(eta^p x^((1-zeta)p) (1-x)^(q+zeta p)).
ApproxUFParams approx_uf_params(std::size_t n, std::size_t p, std::size_t q, double zeta);

struct FamilyOptions {
    /// Above this many (A,B) demand pairs the seeded random fallback is used.
    std::uint64_t demand_cap = 2'000'000;
    std::uint64_t seed = 0x6b70617468ULL;
};

struct UniversalFamily {
    std::vector<VertexSet> sets;
    ApproxUFParams params;
    std::size_t slack = 0;       // floor(zeta p)
    bool certified = true;
    std::string backend;
};

std::uint64_t demand_pair_count(std::size_t n, std::size_t p, std::size_t q);
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

UniversalFamily universal_family(std::size_t n, std::size_t p, std::size_t q, const FamilyOptions& opts = {});
UniversalFamily approx_universal_family(std::size_t n, std::size_t p, std::size_t q, double zeta,
                                        const FamilyOptions& opts = {});

/// {F ∩ {0..i-1} : F in family, 1 <= i <= n}, deduplicated, first-occurrence order.
std::vector<VertexSet> strictify(std::span<const VertexSet> family, std::size_t n);

/// Exhaustive check of the (strict) approximate universal property with slack floor(zeta p).
/// zeta = 0 checks a plain (n,p,q)-universal family.
VerifyOutcome verify_approx_universal(std::span<const VertexSet> family, std::size_t n, std::size_t p,
                                      std::size_t q, double zeta, bool strict,
                                      std::uint64_t cap = kDefaultVerifyCap);

std::size_t slack_for(std::size_t p, double zeta);

// Text form: optional '#' metadata lines of key=value pairs, then one set per line.

struct FamilyFile {
    std::vector<VertexSet> sets;
    std::map<std::string, std::string> metadata;
};

void write_family(std::ostream& out, std::span<const VertexSet> sets,
                  const std::map<std::string, std::string>& metadata);
/// Capacity comes from `n` when given, else from the "n" metadata key.
FamilyFile read_family(std::istream& in, std::optional<std::size_t> n = std::nullopt);

}  // namespace kpath
