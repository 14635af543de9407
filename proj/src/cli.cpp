#include "kpath/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "kpath/cut_kpath.hpp"
#include "kpath/graph.hpp"
#include "kpath/param_opt.hpp"
#include "kpath/set_families.hpp"
#include "kpath/solver.hpp"

namespace kpath {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int resolve_threads(const std::optional<int>& flag) {
    if (flag) {
        if (*flag < 1) throw UsageError("--threads must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv("KPATH_THREADS"); env && *env) {
        int v = 0;
        auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (res.ec != std::errc() || *res.ptr != '\0' || v < 1)
            throw UsageError(std::string("KPATH_THREADS must be a positive integer, got '") + env + "'");
        return v;
    }
    return 1;
}

Digraph read_graph_arg(const std::string& path, std::istream& in) {
    if (path == "-") return parse_graph(in);
    return load_graph(path);
}

FamilyFile read_family_arg(const std::string& path, std::istream& in, std::optional<std::size_t> n) {
    if (path == "-") return read_family(in, n);
    std::ifstream file(path);
    if (!file) throw UsageError("cannot open family file '" + path + "'");
    return read_family(file, n);
}

// "0,1,4-6:3" -> block {0,1,4,5,6} with budget 3
std::pair<std::vector<Vertex>, int> parse_block(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw UsageError("malformed block '" + text + "' (expected ids:budget)");
    std::vector<Vertex> ids;
    std::stringstream items(text.substr(0, colon));
    std::string item;
    auto number = [&](const std::string& s) {
        long long v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0)
            throw UsageError("malformed block '" + text + "'");
        return v;
    };
    while (std::getline(items, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            ids.push_back(static_cast<Vertex>(number(item)));
        } else {
            long long lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
            for (long long v = lo; v <= hi; ++v) ids.push_back(static_cast<Vertex>(v));
        }
    }
    return {ids, static_cast<int>(number(text.substr(colon + 1)))};
}

std::vector<int> member_profile(const VertexSet& s, const UniversePartition& part) {
    std::vector<int> profile;
    for (const auto& b : part.blocks) profile.push_back(static_cast<int>(s.intersection_size(b)));
    return profile;
}

void print_outcome(const VerifyOutcome& r, std::ostream& out) {
    if (r.holds) {
        out << "holds\n";
        return;
    }
    out << "fails: " << r.message << "\n";
    if (r.witness_a) out << "witness A = {" << r.witness_a->to_string() << "}\n";
    if (r.witness_b) out << "witness B = {" << r.witness_b->to_string() << "}\n";
}

struct SolveArgs {
    std::string input = "-";
    int k = 0;
    std::string mode = "cut";
    std::optional<long long> s, t;
    std::optional<double> eps, delta, zeta, cl, cr, cprime;
    std::optional<long long> m, psize, lnum, rnum;
    bool production = false;
    double budget = 1e9;
    bool plain = false;
    bool json = false;
    std::optional<int> threads;
    std::string trace;
    bool prune = false;
    bool timing = false;
};

int do_solve(const SolveArgs& a, std::istream& in, std::ostream& out) {
    if (a.plain && a.json) throw UsageError("--json and --plain are mutually exclusive");
    if (a.s.has_value() != a.t.has_value()) throw UsageError("--s and --t must be given together");
    const Mode mode = parse_mode(a.mode);
    const Digraph g = read_graph_arg(a.input, in);

    SolveConfig config;
    config.tunables = a.production ? production_tunables() : Tunables{};
    if (a.eps) config.tunables.eps = *a.eps;
    if (a.delta) config.tunables.delta = *a.delta;
    if (a.zeta) config.tunables.zeta = *a.zeta;
    if (a.cl) config.tunables.c_l = *a.cl;
    if (a.cr) config.tunables.c_r = *a.cr;
    if (a.cprime) config.tunables.c_prime = *a.cprime;
    config.overrides = {a.m, a.psize, a.lnum, a.rnum};
    if (a.s) {
        const auto n = static_cast<long long>(g.num_vertices());
        if (*a.s < 0 || *a.s >= n || *a.t < 0 || *a.t >= n) throw UsageError("endpoint out of range");
        config.endpoints = Endpoints{static_cast<Vertex>(*a.s), static_cast<Vertex>(*a.t)};
    }
    config.cut.budget = a.budget;
    config.cut.prune = a.prune;
    std::vector<EntryTrace> trace;
    if (!a.trace.empty()) {
        config.cut.trace = &trace;
        config.cut.threads = 1;   // entry traces are recorded by the serial loop
    } else {
        config.cut.threads = resolve_threads(a.threads);
    }

    const SolveResult r = solve(g, a.k, mode, config);

    if (!a.trace.empty()) {
        std::ofstream tf(a.trace);
        if (!tf) throw UsageError("cannot write trace file '" + a.trace + "'");
        tf << "table,stage,left,right,v,raw,reduced\n";
        for (const auto& e : trace)
            tf << e.table << ',' << e.stage << ',' << e.left << ',' << e.right << ',' << e.v << ',' << e.raw << ','
               << e.reduced << '\n';
    }
    if (a.plain) {
        out << (r.yes ? "yes" : "no") << "\n";
        if (r.path) {
            for (std::size_t i = 0; i < r.path->size(); ++i) out << (i ? " " : "") << (*r.path)[i];
            out << "\n";
        }
    } else {
        out << to_json(r, a.timing).dump(2) << "\n";
    }
    return r.yes ? kExitYes : kExitNo;
}

struct VerifyArgs {
    std::string family;
    std::string candidate;
    std::optional<std::size_t> n;
    std::vector<std::string> blocks;
    std::optional<int> budget;
    std::size_t p = 0, q = 0;
    double zeta = 0.0;
    std::uint64_t cap = kDefaultVerifyCap;
};

int do_verify_rep(const VerifyArgs& a, std::istream& in, std::ostream& out) {
    if (a.family == "-" && a.candidate == "-") throw UsageError("only one of --family/--candidate may read stdin");
    FamilyFile fam = read_family_arg(a.family, in, a.n);
    const std::size_t n = a.n ? *a.n : std::stoull(fam.metadata.at("n"));
    FamilyFile cand = read_family_arg(a.candidate, in, n);

    UniversePartition part;
    if (!a.blocks.empty()) {
        if (a.budget) throw UsageError("--budget applies to the single-block form only; use --block ids:budget");
        for (const auto& spec : a.blocks) {
            auto [ids, k] = parse_block(spec);
            VertexSet b(n);
            for (Vertex v : ids) {
                if (v >= n) throw UsageError("block vertex " + std::to_string(v) + " out of range");
                b.insert(v);
            }
            part.blocks.push_back(std::move(b));
            part.budgets.push_back(k);
            part.tradeoffs.push_back(1.0);
        }
    } else {
        if (!a.budget) throw UsageError("give --budget k (single block) or one --block per block");
        part = UniversePartition::single(VertexSet::full(n), *a.budget);
    }
    part.validate();

    SetFamily family{fam.sets, {}}, candidate{cand.sets, {}};
    std::optional<std::vector<int>> profile;
    for (const auto* list : {&family.members, &candidate.members})
        for (const auto& s : *list) {
            auto p = member_profile(s, part);
            if (!profile) profile = p;
            else if (*profile != p) throw UsageError("members do not share one block profile");
            if (!s.subset_of(part.universe())) throw UsageError("member {" + s.to_string() + "} leaves the universe");
        }
    if (profile) family.profile = candidate.profile = *profile;
    const VerifyOutcome r = verify_representation(family, candidate, part, a.cap);
    print_outcome(r, out);
    return r.holds ? kExitYes : kExitNo;
}

int do_verify_universal(const VerifyArgs& a, double zeta, bool strict, std::istream& in, std::ostream& out) {
    FamilyFile fam = read_family_arg(a.family, in, a.n);
    const std::size_t n = a.n ? *a.n : std::stoull(fam.metadata.at("n"));
    const VerifyOutcome r = verify_approx_universal(fam.sets, n, a.p, a.q, zeta, strict, a.cap);
    print_outcome(r, out);
    return r.holds ? kExitYes : kExitNo;
}

struct FamilyArgs {
    std::size_t n = 0, p = 0, q = 0;
    double zeta = 0.0;
    bool strict = false;
    std::optional<std::uint64_t> seed, demand_cap;
    std::string output;
};

int do_family(const FamilyArgs& a, std::ostream& out) {
    FamilyOptions opts;
    if (a.seed) opts.seed = *a.seed;
    if (a.demand_cap) opts.demand_cap = *a.demand_cap;
    UniversalFamily fam = a.zeta > 0.0 ? approx_universal_family(a.n, a.p, a.q, a.zeta, opts)
                                       : universal_family(a.n, a.p, a.q, opts);
    if (a.strict && fam.slack > 0) fam.sets = strictify(fam.sets, a.n);
    std::map<std::string, std::string> meta{{"n", std::to_string(a.n)},
                                            {"p", std::to_string(a.p)},
                                            {"q", std::to_string(a.q)},
                                            {"zeta", shortest(a.zeta)},
                                            {"slack", std::to_string(fam.slack)},
                                            {"strict", a.strict ? "1" : "0"},
                                            {"certified", fam.certified ? "1" : "0"},
                                            {"backend", fam.backend},
                                            {"size", std::to_string(fam.sets.size())}};
    if (a.output.empty() || a.output == "-") {
        write_family(out, fam.sets, meta);
    } else {
        std::ofstream f(a.output);
        if (!f) throw UsageError("cannot write '" + a.output + "'");
        write_family(f, fam.sets, meta);
    }
    return kExitYes;
}

struct OptimizeArgs {
    std::string grid_cl, grid_cr, grid_zeta, delta;
    std::optional<int> iterations, alpha_steps, threads;
    bool plain = false;
    bool reference = false;
};

int do_optimize(const OptimizeArgs& a, std::ostream& out) {
    OptGrid grid;
    if (!a.grid_cl.empty()) grid.cl = parse_range(a.grid_cl);
    if (!a.grid_cr.empty()) grid.cr = parse_range(a.grid_cr);
    if (!a.grid_zeta.empty()) grid.zeta = parse_range(a.grid_zeta);
    if (!a.delta.empty()) {
        GridRange d = parse_range(a.delta + ":1");
        grid.delta_lo = d.lo;
        grid.delta_hi = d.hi;
    }
    if (a.iterations) grid.iterations = *a.iterations;
    if (a.alpha_steps) grid.alpha_steps = *a.alpha_steps;
    const OptResult r = a.reference ? optimize_reference(grid) : optimize(grid, resolve_threads(a.threads));
    if (a.plain) out << to_plain(r);
    else out << to_json(r).dump(2) << "\n";
    return kExitYes;
}

struct BenchArgs {
    std::string corpus;
    std::string manifest;
    std::string output;
    std::optional<int> threads;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

int do_bench(const BenchArgs& a, std::ostream& out) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(a.corpus)) throw UsageError("corpus directory '" + a.corpus + "' not found");
    const fs::path manifest = a.manifest.empty() ? fs::path(a.corpus) / "manifest.csv" : fs::path(a.manifest);
    std::ifstream mf(manifest);
    if (!mf) throw UsageError("manifest '" + manifest.string() + "' not found");

    std::ofstream file_out;
    std::ostream* sink = &out;
    if (!a.output.empty() && a.output != "-") {
        file_out.open(a.output);
        if (!file_out) throw UsageError("cannot write '" + a.output + "'");
        sink = &file_out;
    }
    *sink << "graph,k,mode,answer,entries,raw_members,reduced_members,reduction_ratio,max_family,wall_ms\n";

    SolveConfig config;
    config.cut.threads = resolve_threads(a.threads);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(mf, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (fields.size() != 3) throw UsageError("malformed manifest line " + std::to_string(lineno));
        if (fields[0] == "file") continue;
        int k = 0;
        auto res = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), k);
        if (res.ec != std::errc() || res.ptr != fields[1].data() + fields[1].size() || k < 1)
            throw UsageError("malformed k on manifest line " + std::to_string(lineno));
        const Mode mode = parse_mode(fields[2]);
        const Digraph g = load_graph((fs::path(a.corpus) / fields[0]).string());
        const SolveResult r = solve(g, k, mode, config);
        const auto& s = r.stats;
        char ratio[32], wall[32];
        std::snprintf(ratio, sizeof ratio, "%.4f",
                      s.raw_members ? static_cast<double>(s.reduced_members) / static_cast<double>(s.raw_members) : 1.0);
        std::snprintf(wall, sizeof wall, "%.3f", s.wall_ms);
        *sink << fields[0] << ',' << k << ',' << mode_name(mode) << ',' << (r.yes ? "yes" : "no") << ','
              << s.entries << ',' << s.raw_members << ',' << s.reduced_members << ',' << ratio << ','
              << s.max_family << ',' << wall << '\n';
    }
    return kExitYes;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deterministic k-Path solvers, set-family verifiers and the running-time analysis optimizer",
                 "kpath"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Decide k-Path (or k-(s,t)-Path) on an edge-list graph");
    solve_cmd->add_option("input", sa.input, "Graph file, or - for stdin")->capture_default_str();
    solve_cmd->add_option("--k", sa.k, "Number of path vertices")->required()->check(CLI::PositiveNumber);
    solve_cmd->add_option("--mode", sa.mode, "brute | baseline | cut")->capture_default_str();
    solve_cmd->add_option("--s", sa.s, "Required first vertex");
    solve_cmd->add_option("--t", sa.t, "Required last vertex");
    solve_cmd->add_option("--eps", sa.eps, "epsilon (Psize = ceil(eps k))");
    solve_cmd->add_option("--delta", sa.delta, "delta (m = delta / eps)");
    solve_cmd->add_option("--zeta", sa.zeta, "zeta in [0, 1)");
    solve_cmd->add_option("--cl", sa.cl, "Trade-off constant for L blocks");
    solve_cmd->add_option("--cr", sa.cr, "Trade-off constant for R blocks");
    solve_cmd->add_option("--cprime", sa.cprime, "Trade-off constant for the second stage");
    solve_cmd->add_option("--m", sa.m, "Override m");
    solve_cmd->add_option("--psize", sa.psize, "Override Psize");
    solve_cmd->add_option("--lnum", sa.lnum, "Override Lnum");
    solve_cmd->add_option("--rnum", sa.rnum, "Override Rnum");
    solve_cmd->add_flag("--production-params", sa.production, "Start from the production constants of the analysis");
    solve_cmd->add_option("--budget", sa.budget, "Cap on n^(m+2) m! |F| Cut k-Path instances")->capture_default_str();
    solve_cmd->add_flag("--json", sa.json, "JSON output (default)");
    solve_cmd->add_flag("--plain", sa.plain, "Plain output: answer line, then the path");
    solve_cmd->add_option("--threads", sa.threads, "Worker threads (default: KPATH_THREADS or 1)");
    solve_cmd->add_option("--trace", sa.trace, "Write per-entry family sizes as CSV (runs serially)");
    solve_cmd->add_flag("--prune", sa.prune, "Skip V_e sequences with an endpoint lacking usable neighbours");
    solve_cmd->add_flag("--timing", sa.timing, "Include wall time in the JSON statistics");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Exhaustively check a family property");
    verify_cmd->require_subcommand(1);
    auto* v_rep = verify_cmd->add_subcommand("rep", "Candidate represents family over a partitioned universe");
    v_rep->add_option("--family", va.family, "Family file")->required();
    v_rep->add_option("--candidate", va.candidate, "Candidate subfamily file")->required();
    v_rep->add_option("--n", va.n, "Universe size (default: family metadata)");
    v_rep->add_option("--block", va.blocks, "Block as ids:budget, e.g. 0-5:3 (repeatable)");
    v_rep->add_option("--budget", va.budget, "Budget of the single block [0, n)");
    v_rep->add_option("--cap", va.cap, "Enumeration cap")->capture_default_str();
    struct UniversalSub {
        const char* name;
        const char* help;
        bool needs_zeta;
        bool strict;
        CLI::App* app = nullptr;
    };
    UniversalSub subs[] = {{"universal", "(n,p,q)-universal family", false, false},
                           {"approx", "(n,p,q,zeta)-approximate universal family", true, false},
                           {"strict", "Strict (n,p,q,zeta)-approximate universal family", true, true}};
    for (auto& sub : subs) {
        sub.app = verify_cmd->add_subcommand(sub.name, sub.help);
        sub.app->add_option("--family", va.family, "Family file, or - for stdin")->required();
        sub.app->add_option("--n", va.n, "Universe size (default: family metadata)");
        sub.app->add_option("--p", va.p, "|A|")->required();
        sub.app->add_option("--q", va.q, "|B|")->required();
        if (sub.needs_zeta) sub.app->add_option("--zeta", va.zeta, "zeta in (0, 1)")->required();
        sub.app->add_option("--cap", va.cap, "Enumeration cap")->capture_default_str();
    }

    FamilyArgs fa;
    auto* family_cmd = app.add_subcommand("family", "Construct an (approximate) universal family");
    family_cmd->add_option("--n", fa.n, "Universe size")->required();
    family_cmd->add_option("--p", fa.p, "|A|")->required();
    family_cmd->add_option("--q", fa.q, "|B|")->required();
    family_cmd->add_option("--zeta", fa.zeta, "zeta in [0, 1); 0 builds a plain universal family");
    family_cmd->add_flag("--strict", fa.strict, "Apply the prefix construction");
    family_cmd->add_option("--seed", fa.seed, "Seed of the random fallback");
    family_cmd->add_option("--demand-cap", fa.demand_cap, "Demand pairs above which the random fallback is used");
    family_cmd->add_option("--output", fa.output, "Output file (default stdout)");

    OptimizeArgs oa;
    auto* opt_cmd = app.add_subcommand("optimize", "Grid search with bisection over the analysis parameters");
    opt_cmd->add_option("--grid-cl", oa.grid_cl, "lo:hi:steps (default 1.00:1.40:40)");
    opt_cmd->add_option("--grid-cr", oa.grid_cr, "lo:hi:steps (default 1.40:1.80:40)");
    opt_cmd->add_option("--grid-zeta", oa.grid_zeta, "lo:hi:steps (default 0.10:0.90:80)");
    opt_cmd->add_option("--delta", oa.delta, "Bisection interval lo:hi (default 0.25:0.75)");
    opt_cmd->add_option("--iterations", oa.iterations, "Bisection iterations (default 30)");
    opt_cmd->add_option("--alpha-steps", oa.alpha_steps, "alpha_l grid steps (default 1000)");
    opt_cmd->add_option("--threads", oa.threads, "Worker threads (default: KPATH_THREADS or 1)");
    opt_cmd->add_flag("--plain", oa.plain, "Two lines: best_Y, then [cl, cr, zeta, delta]");
    opt_cmd->add_flag("--reference", oa.reference, "Use the serial reference evaluation");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Run a manifest of (file, k, mode) cells and report CSV");
    bench_cmd->add_option("corpus", ba.corpus, "Corpus directory")->required();
    bench_cmd->add_option("--manifest", ba.manifest, "Manifest CSV (default corpus/manifest.csv)");
    bench_cmd->add_option("--output", ba.output, "CSV output file (default stdout)");
    bench_cmd->add_option("--threads", ba.threads, "Worker threads (default: KPATH_THREADS or 1)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitYes;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitYes;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) return do_solve(sa, in, out);
        if (verify_cmd->parsed()) {
            if (v_rep->parsed()) return do_verify_rep(va, in, out);
            for (const auto& sub : subs)
                if (sub.app->parsed()) return do_verify_universal(va, sub.needs_zeta ? va.zeta : 0.0, sub.strict, in, out);
        }
        if (family_cmd->parsed()) return do_family(fa, out);
        if (opt_cmd->parsed()) return do_optimize(oa, out);
        if (bench_cmd->parsed()) return do_bench(ba, out);
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const ParseError& e) {
        err << "error: parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace kpath
