// Serial reference vs OpenMP kernels: timings and output equality.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "CLI11.hpp"
#include "kpath/param_opt.hpp"
#include "kpath/set_families.hpp"
#include "kpath/solver.hpp"

using namespace kpath;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

bool report(const char* kernel, double serial_ms, double parallel_ms, bool same) {
    std::printf("%-28s serial %10.2f ms  parallel %10.2f ms  speedup %5.2fx  %s\n", kernel, serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, same ? "identical" : "MISMATCH");
    return same;
}

Digraph random_digraph(std::size_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && coin(rng)) edges.emplace_back(u, v);
    return Digraph(n, std::move(edges));
}

bool bench_cut(int threads) {
    std::mt19937_64 rng(7);
    Tunables t;
    t.zeta = 0.5;
    const CutParams params = derive_params(8, t, {2, 1, std::nullopt, std::nullopt});
    std::vector<Digraph> graphs;
    for (int i = 0; i < 6; ++i) graphs.push_back(random_digraph(9, 0.12 + 0.02 * i, rng));

    std::vector<std::string> serial_out, parallel_out;
    auto run = [&](int th, std::vector<std::string>& out) {
        CutSolverOptions opts;
        opts.threads = th;
        for (const auto& g : graphs) {
            auto r = cut_solver(g, params, std::nullopt, opts);
            auto j = nlohmann::json::object();
            j["path"] = r.path ? nlohmann::json(*r.path) : nlohmann::json();
            j["instances"] = r.stats.cut_instances;
            j["entries"] = r.stats.entries;
            out.push_back(j.dump());
        }
    };
    const double s = time_ms([&] { run(1, serial_out); });
    const double p = time_ms([&] { run(threads, parallel_out); });
    return report("cut_solver", s, p, serial_out == parallel_out);
}

bool bench_optimize(int threads) {
    OptGrid grid;
    grid.cl = {1.00, 1.40, 10};
    grid.cr = {1.40, 1.80, 10};
    grid.zeta = {0.10, 0.90, 20};
    OptResult ref, one, many;
    const double r = time_ms([&] { ref = optimize_reference(grid); });
    const double s = time_ms([&] { one = optimize(grid, 1); });
    const double p = time_ms([&] { many = optimize(grid, threads); });
    std::printf("%-28s %10.2f ms\n", "optimize_reference", r);
    const bool close = std::abs(ref.best_Y - one.best_Y) < 1e-12 && ref.cl == one.cl && ref.cr == one.cr &&
                       ref.zeta == one.zeta;
    if (!close) std::printf("optimize: log-domain kernel disagrees with the reference\n");
    return report("optimize", s, p, to_json(one).dump() == to_json(many).dump()) && close;
}

bool bench_rep() {
    std::mt19937_64 rng(11);
    const std::size_t n = 40;
    UniversePartition part;
    part.blocks = {VertexSet(n), VertexSet(n)};
    for (Vertex v = 0; v < n; ++v) part.blocks[v % 2].insert(v);
    part.budgets = {7, 7};
    part.tradeoffs = {1.0, 1.0};
    RepresentationKernel kernel(part);
    const std::vector<int> profile{3, 3};
    std::vector<VertexSet> members;
    for (int i = 0; i < 4000; ++i) {
        VertexSet s(n);
        for (int b = 0; b < 2; ++b)
            while (s.intersection_size(part.blocks[b]) < 3) s.insert(static_cast<Vertex>(2 * (rng() % (n / 2)) + b));
        members.push_back(s);
    }
    std::vector<std::size_t> a, b;
    const double s = time_ms([&] { a = kernel.select(members, profile, false); });
    const double p = time_ms([&] { b = kernel.select(members, profile, true); });
    return report("representation kernel", s, p, a == b);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs parallel kernel benchmark"};
    int threads = omp_get_max_threads();
    app.add_option("--threads", threads, "threads for the parallel runs")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    if (threads < 2) threads = 2;
    std::printf("parallel runs use %d threads (%d available)\n", threads, omp_get_num_procs());
    bool ok = bench_rep();
    ok = bench_cut(threads) && ok;
    ok = bench_optimize(threads) && ok;
    return ok ? 0 : 1;
}
