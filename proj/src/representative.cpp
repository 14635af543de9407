#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "combinatorics.hpp"
#include "kpath/set_families.hpp"

namespace kpath {

namespace {

using u64 = std::uint64_t;

u64 pow_mod(u64 b, u64 e, u64 m) {
    u64 r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Determinant of a dim x dim matrix (row-major) over GF(mod); destroys `a`.
u64 det_mod(std::vector<u64>& a, std::size_t dim, u64 mod) {
    u64 det = 1;
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        while (piv < dim && a[piv * dim + col] == 0) ++piv;
        if (piv == dim) return 0;
        if (piv != col) {
            for (std::size_t j = 0; j < dim; ++j) std::swap(a[piv * dim + j], a[col * dim + j]);
            det = (mod - det) % mod;
        }
        u64 pv = a[col * dim + col];
        det = det * pv % mod;
        u64 inv = pow_mod(pv, mod - 2, mod);
        for (std::size_t r = col + 1; r < dim; ++r) {
            u64 f = a[r * dim + col] * inv % mod;
            if (f == 0) continue;
            for (std::size_t j = col; j < dim; ++j)
                a[r * dim + j] = (a[r * dim + j] + mod - f * a[col * dim + j] % mod) % mod;
        }
    }
    return det;
}

std::vector<std::vector<int>> row_subsets(int rows, int size) {
    std::vector<int> pool(static_cast<std::size_t>(rows));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::vector<int>> out;
    detail::for_each_combination<int>(pool, static_cast<std::size_t>(size), [&](std::span<const int> c) {
        out.emplace_back(c.begin(), c.end());
        return true;
    });
    return out;
}

}  // namespace

std::uint64_t field_modulus_for(std::size_t n) {
    u64 p = std::max<u64>(n, 257) + 1;
    while (!is_prime(p)) ++p;
    return p;
}

UniversePartition UniversePartition::single(VertexSet universe, int budget, double c) {
    UniversePartition part;
    part.blocks.push_back(std::move(universe));
    part.budgets.push_back(budget);
    part.tradeoffs.push_back(c);
    return part;
}

void UniversePartition::validate() const {
    if (blocks.size() != budgets.size() || blocks.size() != tradeoffs.size())
        throw ContractError("partition blocks, budgets and constants differ in length");
    if (blocks.empty()) throw ContractError("partition has no blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (budgets[i] < 0) throw ContractError("negative block budget");
        if (!(tradeoffs[i] >= 1.0)) throw ContractError("trade-off constant below 1");
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (!blocks[i].disjoint(blocks[j])) throw ContractError("partition blocks overlap");
    }
}

VertexSet UniversePartition::universe() const {
    VertexSet u(capacity());
    for (const auto& b : blocks) u = u | b;
    return u;
}

RepresentationKernel::RepresentationKernel(UniversePartition partition)
    : part_(std::move(partition)), modulus_(field_modulus_for(part_.capacity())) {
    part_.validate();
    const std::size_t n = part_.capacity();
    block_of_.assign(n, -1);
    powers_.assign(n, {});
    for (std::size_t b = 0; b < part_.blocks.size(); ++b) {
        part_.blocks[b].for_each([&](Vertex v) {
            block_of_[v] = static_cast<int>(b);
            auto& row = powers_[v];
            row.resize(static_cast<std::size_t>(part_.budgets[b]));
            u64 x = 1;
            for (auto& e : row) {
                e = static_cast<std::uint32_t>(x);
                x = x * (v + 1) % modulus_;
            }
        });
    }
}

namespace {

struct BlockPlan {
    std::vector<std::vector<int>> rows;   // row subsets of size p_i
};

}  // namespace

static std::vector<BlockPlan> make_plan(const UniversePartition& part, std::span<const int> profile) {
    if (profile.size() != part.blocks.size())
        throw ContractError("profile length does not match partition");
    std::vector<BlockPlan> plan(profile.size());
    for (std::size_t b = 0; b < profile.size(); ++b) {
        if (profile[b] < 0 || profile[b] > part.budgets[b])
            throw ContractError("profile p_i exceeds budget k_i in block " + std::to_string(b));
        plan[b].rows = row_subsets(part.budgets[b], profile[b]);
    }
    return plan;
}

static std::vector<std::uint32_t> compute_vector(const VertexSet& member, std::span<const int> profile,
                                                 const std::vector<BlockPlan>& plan,
                                                 const std::vector<int>& block_of,
                                                 const std::vector<std::vector<std::uint32_t>>& powers,
                                                 u64 mod) {
    const std::size_t t = profile.size();
    std::vector<std::vector<Vertex>> cols(t);
    member.for_each([&](Vertex v) {
        int b = v < block_of.size() ? block_of[v] : -1;
        if (b < 0) throw ContractError("member contains vertex " + std::to_string(v) + " outside the universe");
        cols[static_cast<std::size_t>(b)].push_back(v);
    });
    std::vector<u64> acc{1};
    std::vector<u64> scratch;
    for (std::size_t b = 0; b < t; ++b) {
        const auto dim = static_cast<std::size_t>(profile[b]);
        if (cols[b].size() != dim)
            throw ContractError("member {" + member.to_string() + "} violates the block profile");
        std::vector<u64> block_vec;
        block_vec.reserve(plan[b].rows.size());
        for (const auto& rs : plan[b].rows) {
            scratch.assign(dim * dim, 0);
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c < dim; ++c)
                    scratch[r * dim + c] = powers[cols[b][c]][static_cast<std::size_t>(rs[r])];
            block_vec.push_back(det_mod(scratch, dim, mod));
        }
        std::vector<u64> next;
        next.reserve(acc.size() * block_vec.size());
        for (u64 a : acc)
            for (u64 w : block_vec) next.push_back(a * w % mod);
        acc = std::move(next);
    }
    return {acc.begin(), acc.end()};
}

std::vector<std::uint32_t> RepresentationKernel::minor_vector(const VertexSet& member,
                                                              std::span<const int> profile) const {
    auto plan = make_plan(part_, profile);
    return compute_vector(member, profile, plan, block_of_, powers_, modulus_);
}

std::vector<std::size_t> RepresentationKernel::select(std::span<const VertexSet> members,
                                                      std::span<const int> profile, bool parallel) const {
    auto plan = make_plan(part_, profile);
    const std::size_t count = members.size();
    std::vector<std::vector<std::uint32_t>> vecs(count);
    if (parallel && count > 32) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
            try {
                vecs[static_cast<std::size_t>(i)] =
                    compute_vector(members[static_cast<std::size_t>(i)], profile, plan, block_of_, powers_, modulus_);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t i = 0; i < count; ++i)
            vecs[i] = compute_vector(members[i], profile, plan, block_of_, powers_, modulus_);
    }

    const u64 mod = modulus_;
    const std::size_t dim = vecs.empty() ? 0 : vecs.front().size();
    std::vector<std::vector<u64>> basis;
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> kept;
    std::vector<u64> v(dim);
    for (std::size_t i = 0; i < count && basis.size() < dim; ++i) {
        std::copy(vecs[i].begin(), vecs[i].end(), v.begin());
        for (std::size_t r = 0; r < basis.size(); ++r) {
            u64 f = v[pivots[r]];
            if (f == 0) continue;
            const auto& row = basis[r];
            for (std::size_t j = 0; j < dim; ++j)
                if (row[j]) v[j] = (v[j] + mod - f * row[j] % mod) % mod;
        }
        auto it = std::find_if(v.begin(), v.end(), [](u64 x) { return x != 0; });
        if (it == v.end()) continue;
        auto piv = static_cast<std::size_t>(it - v.begin());
        u64 inv = pow_mod(v[piv], mod - 2, mod);
        for (auto& x : v) x = x * inv % mod;
        basis.push_back(v);
        pivots.push_back(piv);
        kept.push_back(i);
    }
    return kept;
}

SetFamily rep_family(const SetFamily& family, const UniversePartition& partition) {
    RepresentationKernel kernel(partition);
    std::vector<VertexSet> unique;
    std::unordered_set<VertexSet, VertexSetHash> seen;
    for (const auto& m : family.members)
        if (seen.insert(m).second) unique.push_back(m);
    SetFamily out;
    out.profile = family.profile;
    for (auto i : kernel.select(unique, family.profile)) out.members.push_back(unique[i]);
    return out;
}

VerifyOutcome verify_representation(const SetFamily& family, const SetFamily& candidate,
                                    const UniversePartition& partition, std::uint64_t cap) {
    partition.validate();
    VerifyOutcome result;
    std::unordered_set<VertexSet, VertexSetHash> members(family.members.begin(), family.members.end());
    for (const auto& c : candidate.members) {
        if (!members.contains(c)) {
            result.holds = false;
            result.witness_a = c;
            result.message = "candidate member {" + c.to_string() + "} is not in the family";
            return result;
        }
    }
    const auto& profile = family.profile.empty() ? candidate.profile : family.profile;
    const std::size_t t = partition.blocks.size();
    if (profile.size() != t) {
        if (family.members.empty() && candidate.members.empty()) return result;
        throw ContractError("profile length does not match partition");
    }

    std::vector<std::vector<Vertex>> pools(t);
    std::vector<std::size_t> budgets(t);
    long double total = 1;
    for (std::size_t b = 0; b < t; ++b) {
        int q = partition.budgets[b] - profile[b];
        if (q < 0) throw ContractError("profile p_i exceeds budget k_i");
        pools[b] = partition.blocks[b].members();
        budgets[b] = static_cast<std::size_t>(q);
        long double per_block = 0;
        for (std::size_t j = 0; j <= budgets[b] && j <= pools[b].size(); ++j)
            per_block += static_cast<long double>(binomial(pools[b].size(), j));
        total *= per_block;
    }
    if (total > static_cast<long double>(cap)) throw CapExceeded();

    // Blocker enumeration: block by block, sizes ascending, combinations lexicographic.
    VertexSet blocker(partition.capacity());
    auto check = [&]() {
        bool any = std::any_of(family.members.begin(), family.members.end(),
                               [&](const VertexSet& a) { return a.disjoint(blocker); });
        if (!any) return true;
        return std::any_of(candidate.members.begin(), candidate.members.end(),
                           [&](const VertexSet& a) { return a.disjoint(blocker); });
    };
    std::function<bool(std::size_t)> rec = [&](std::size_t b) -> bool {
        if (b == t) {
            if (check()) return true;
            result.holds = false;
            result.witness_b = blocker;
            result.message = "blocker B = {" + blocker.to_string() + "} is avoided by the family but not by the candidate";
            return false;
        }
        for (std::size_t size = 0; size <= budgets[b] && size <= pools[b].size(); ++size) {
            bool ok = detail::for_each_combination<Vertex>(pools[b], size, [&](std::span<const Vertex> pick) {
                for (Vertex v : pick) blocker.insert(v);
                bool cont = rec(b + 1);
                for (Vertex v : pick) blocker.erase(v);
                return cont;
            });
            if (!ok) return false;
        }
        return true;
    };
    rec(0);
    return result;
}

}  // namespace kpath
