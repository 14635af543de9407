#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "combinatorics.hpp"
#include "kpath/set_families.hpp"

namespace kpath {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double r = 1;
    std::uint64_t exact = 1;
    bool overflow = false;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (!overflow) {
            // exact / i stays integral because exact * (n-k+i) is divisible by i
            unsigned __int128 t = static_cast<unsigned __int128>(exact) * (n - k + i) / i;
            if (t > UINT64_MAX) overflow = true;
            else exact = static_cast<std::uint64_t>(t);
        }
    }
    if (overflow) return r >= 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(r);
    return exact;
}

std::uint64_t demand_pair_count(std::size_t n, std::size_t p, std::size_t q) {
    if (p + q > n) return 0;
    auto a = binomial(n, p);
    auto b = binomial(n - p, q);
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

std::size_t slack_for(std::size_t p, double zeta) {
    // tolerance keeps e.g. 0.29 * 100 from flooring to 28
    return static_cast<std::size_t>(std::floor(zeta * static_cast<double>(p) + 1e-9));
}

ApproxUFParams approx_uf_params(std::size_t n, std::size_t p, std::size_t q, double zeta) {
    ApproxUFParams r;
    r.n = n;
    r.p = p;
    r.q = q;
    r.zeta = zeta;
    const double pd = static_cast<double>(p), qd = static_cast<double>(q);
    r.x = (p + q == 0) ? 0.5 : (1.0 - zeta) * pd / (pd + qd);
    r.eta = 1.0 / (std::pow(zeta, zeta) * std::pow(1.0 - zeta, 1.0 - zeta));
    r.size_bound = 1.0 / (std::pow(r.eta, pd) * std::pow(r.x, (1.0 - zeta) * pd) *
                          std::pow(1.0 - r.x, qd + zeta * pd));
    return r;
}

namespace {

// Greedy cover of all (A,B) demand pairs by the method of conditional expectations.
// Each set is built element by element; for undecided elements the inclusion events
// are independent with probability x, so a pair's success probability factors as
// (1-x)^{undecided B} * P[Binomial(undecided A, 1-x) <= slack - excluded A].
std::vector<VertexSet> greedy_cover(std::size_t n, std::size_t p, std::size_t q, std::size_t slack,
                                    double x) {
    std::vector<Vertex> pool(n);
    std::iota(pool.begin(), pool.end(), Vertex{0});

    const std::size_t width = p + q;
    std::vector<Vertex> flat;   // per pair: p A-elements then q B-elements
    detail::for_each_combination<Vertex>(pool, p, [&](std::span<const Vertex> a) {
        std::vector<Vertex> rest;
        std::size_t ai = 0;
        for (Vertex v : pool) {
            if (ai < a.size() && a[ai] == v) ++ai;
            else rest.push_back(v);
        }
        detail::for_each_combination<Vertex>(rest, q, [&](std::span<const Vertex> b) {
            flat.insert(flat.end(), a.begin(), a.end());
            flat.insert(flat.end(), b.begin(), b.end());
            return true;
        });
        return true;
    });
    const std::size_t pairs = width == 0 ? 1 : flat.size() / width;

    std::vector<std::vector<std::uint32_t>> inc_a(n), inc_b(n);
    for (std::size_t i = 0; i < pairs; ++i) {
        for (std::size_t j = 0; j < p; ++j) inc_a[flat[i * width + j]].push_back(static_cast<std::uint32_t>(i));
        for (std::size_t j = p; j < width; ++j) inc_b[flat[i * width + j]].push_back(static_cast<std::uint32_t>(i));
    }

    // below[u][b + 1] = P[Binomial(u, 1-x) <= b], b in [-1, slack]
    std::vector<std::vector<double>> below(p + 1, std::vector<double>(slack + 2, 0.0));
    for (std::size_t u = 0; u <= p; ++u) {
        std::vector<double> pmf(u + 1, 0.0);
        pmf[0] = 1.0;
        for (std::size_t t = 0; t < u; ++t)
            for (std::size_t c = t + 1; c-- > 0;) {
                double stay = pmf[c] * x;
                double miss = c > 0 ? pmf[c - 1] * (1.0 - x) : 0.0;
                pmf[c] = stay + miss;
            }
        double acc = 0.0;
        for (std::size_t b = 0; b <= slack; ++b) {
            if (b <= u) acc += pmf[b];
            below[u][b + 1] = std::min(acc, 1.0);
        }
    }
    std::vector<double> pow_b(q + 1, 1.0);
    for (std::size_t i = 1; i <= q; ++i) pow_b[i] = pow_b[i - 1] * (1.0 - x);

    std::vector<char> covered(pairs, 0);
    std::size_t remaining = pairs;
    std::vector<std::uint32_t> out_a(pairs), und_a(pairs), und_b(pairs);
    std::vector<char> dead(pairs);
    auto prob = [&](std::size_t ua, std::size_t ub, long long budget) {
        if (budget < 0) return 0.0;
        auto b = static_cast<std::size_t>(std::min<long long>(budget, static_cast<long long>(slack)));
        return pow_b[ub] * below[ua][b + 1];
    };

    std::vector<VertexSet> family;
    while (remaining > 0) {
        for (std::size_t i = 0; i < pairs; ++i) {
            out_a[i] = 0;
            und_a[i] = static_cast<std::uint32_t>(p);
            und_b[i] = static_cast<std::uint32_t>(q);
            dead[i] = covered[i];
        }
        VertexSet f(n);
        for (std::size_t e = 0; e < n; ++e) {
            double gain_in = 0.0, gain_out = 0.0;
            for (auto i : inc_a[e]) {
                if (dead[i]) continue;
                long long budget = static_cast<long long>(slack) - out_a[i];
                gain_in += prob(und_a[i] - 1u, und_b[i], budget);
                gain_out += prob(und_a[i] - 1u, und_b[i], budget - 1);
            }
            for (auto i : inc_b[e]) {
                if (dead[i]) continue;
                long long budget = static_cast<long long>(slack) - out_a[i];
                gain_out += prob(und_a[i], und_b[i] - 1u, budget);
            }
            const bool take = gain_in > gain_out;
            if (take) f.insert(static_cast<Vertex>(e));
            for (auto i : inc_a[e]) {
                --und_a[i];
                if (!take) ++out_a[i];
            }
            for (auto i : inc_b[e]) {
                --und_b[i];
                if (take) dead[i] = 1;
            }
        }
        std::size_t gained = 0;
        for (std::size_t i = 0; i < pairs; ++i) {
            if (covered[i] || dead[i] || out_a[i] > slack) continue;
            covered[i] = 1;
            ++gained;
        }
        if (gained == 0) {
            // Rounding guard: U \ B covers the first open pair outright.
            std::size_t i = 0;
            while (covered[i]) ++i;
            f = VertexSet::full(n);
            for (std::size_t j = p; j < width; ++j) f.erase(flat[i * width + j]);
            for (std::size_t k = 0; k < pairs; ++k) {
                if (covered[k]) continue;
                bool ok = true;
                std::size_t miss = 0;
                for (std::size_t j = 0; j < p; ++j) miss += !f.contains(flat[k * width + j]);
                for (std::size_t j = p; j < width; ++j) ok = ok && !f.contains(flat[k * width + j]);
                if (ok && miss <= slack) {
                    covered[k] = 1;
                    ++gained;
                }
            }
        }
        remaining -= gained;
        family.push_back(std::move(f));
    }
    return family;
}

std::vector<VertexSet> random_family(std::size_t n, double x, double size_bound, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double capped = std::min(size_bound, 1e6);
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(capped)));
    std::vector<VertexSet> family;
    family.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        VertexSet f(n);
        for (std::size_t v = 0; v < n; ++v) {
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u < x) f.insert(static_cast<Vertex>(v));
        }
        family.push_back(std::move(f));
    }
    return family;
}

UniversalFamily build(std::size_t n, std::size_t p, std::size_t q, std::size_t slack,
                      const ApproxUFParams& params, const FamilyOptions& opts) {
    UniversalFamily out;
    out.params = params;
    out.slack = slack;
    if (demand_pair_count(n, p, q) > opts.demand_cap) {
        out.sets = random_family(n, params.x, params.size_bound, opts.seed);
        out.certified = false;
        out.backend = "seeded-random";
    } else {
        out.sets = greedy_cover(n, p, q, slack, params.x);
        out.certified = true;
        out.backend = "greedy-conditional-expectation";
    }
    return out;
}

}  // namespace

UniversalFamily universal_family(std::size_t n, std::size_t p, std::size_t q, const FamilyOptions& opts) {
    if (p + q > n) throw ContractError("universal family requires p + q <= n");
    return build(n, p, q, 0, approx_uf_params(n, p, q, 0.0), opts);
}

UniversalFamily approx_universal_family(std::size_t n, std::size_t p, std::size_t q, double zeta,
                                        const FamilyOptions& opts) {
    if (!(zeta > 0.0 && zeta < 1.0)) throw ContractError("approximate universal family requires 0 < zeta < 1");
    if (p < 1) throw ContractError("approximate universal family requires p >= 1");
    if (p + q > n) throw ContractError("approximate universal family requires p + q <= n");
    return build(n, p, q, slack_for(p, zeta), approx_uf_params(n, p, q, zeta), opts);
}

std::vector<VertexSet> strictify(std::span<const VertexSet> family, std::size_t n) {
    std::vector<VertexSet> out;
    std::unordered_set<VertexSet, VertexSetHash> seen;
    for (const auto& f : family) {
        VertexSet prefix(n);
        for (std::size_t i = 1; i <= n; ++i) {
            auto v = static_cast<Vertex>(i - 1);
            if (f.contains(v)) prefix.insert(v);
            if (seen.insert(prefix).second) out.push_back(prefix);
        }
    }
    return out;
}

VerifyOutcome verify_approx_universal(std::span<const VertexSet> family, std::size_t n, std::size_t p,
                                      std::size_t q, double zeta, bool strict, std::uint64_t cap) {
    if (p + q > n) throw ContractError("verification requires p + q <= n");
    if (demand_pair_count(n, p, q) > cap) throw CapExceeded();
    const std::size_t slack = slack_for(p, zeta);
    VerifyOutcome result;
    std::vector<Vertex> pool(n);
    std::iota(pool.begin(), pool.end(), Vertex{0});
    VertexSet a_set(n), b_set(n);
    detail::for_each_combination<Vertex>(pool, p, [&](std::span<const Vertex> a) {
        a_set = VertexSet(n);
        for (Vertex v : a) a_set.insert(v);
        std::vector<Vertex> rest;
        for (Vertex v : pool)
            if (!a_set.contains(v)) rest.push_back(v);
        return detail::for_each_combination<Vertex>(rest, q, [&](std::span<const Vertex> b) {
            b_set = VertexSet(n);
            for (Vertex v : b) b_set.insert(v);
            for (const auto& f : family) {
                if (f.capacity() != n || !f.disjoint(b_set)) continue;
                std::size_t missing = p - a_set.intersection_size(f);
                if (strict ? missing == slack : missing <= slack) return true;
            }
            result.holds = false;
            result.witness_a = a_set;
            result.witness_b = b_set;
            result.message = "no set serves A = {" + a_set.to_string() + "}, B = {" + b_set.to_string() + "}";
            return false;
        });
    });
    return result;
}

void write_family(std::ostream& out, std::span<const VertexSet> sets,
                  const std::map<std::string, std::string>& metadata) {
    if (!metadata.empty()) {
        out << '#';
        for (const auto& [k, v] : metadata) out << ' ' << k << '=' << v;
        out << '\n';
    }
    for (const auto& s : sets) out << s.to_string() << '\n';
}

FamilyFile read_family(std::istream& in, std::optional<std::size_t> n) {
    FamilyFile file;
    std::vector<std::vector<long long>> raw;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') {
            std::istringstream kv(line.substr(1));
            std::string tok;
            while (kv >> tok) {
                auto eq = tok.find('=');
                if (eq != std::string::npos) file.metadata[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        std::istringstream ids(line);
        std::vector<long long> set;
        long long v;
        while (ids >> v) set.push_back(v);
        if (!ids.eof()) throw std::runtime_error("malformed family line '" + line + "'");
        raw.push_back(std::move(set));
    }
    std::size_t cap = 0;
    if (n) cap = *n;
    else if (auto it = file.metadata.find("n"); it != file.metadata.end()) cap = std::stoull(it->second);
    else throw std::runtime_error("family file does not record n; pass it explicitly");
    for (const auto& set : raw) {
        VertexSet s(cap);
        for (long long v : set) {
            if (v < 0 || static_cast<std::size_t>(v) >= cap)
                throw std::runtime_error("family member id " + std::to_string(v) + " out of range");
            s.insert(static_cast<Vertex>(v));
        }
        file.sets.push_back(std::move(s));
    }
    return file;
}

}  // namespace kpath
