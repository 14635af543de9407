#include "kpath/param_opt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kpath {

double phi(double alpha, double c) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw AnalysisDomainError("phi: alpha must lie in [0, 1]");
    if (!(c >= 1.0)) throw AnalysisDomainError("phi: c must be at least 1");
    // alpha <= 1 <= c, so alpha >= c only at alpha = c = 1, where the formula reads 1/0^0/0^0
    return std::pow(c, 2.0 - alpha) / std::pow(alpha, alpha) / std::pow(c - alpha, 2.0 - 2.0 * alpha);
}

std::vector<double> frange(double a, double b, int steps) {
    if (steps < 0) throw std::invalid_argument("frange: negative step count");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    if (steps == 0) {
        out.push_back(a);
        return out;
    }
    for (int x = 0; x <= steps; ++x) out.push_back(a + (b - a) * static_cast<double>(x) / steps);
    return out;
}

Y1Value calc_Y1(double delta, double zeta, double cl, double cr, Y1Method method, const Y1Grid& grid) {
    const double lnum = (1 - zeta) * delta;
    const double rnum = 1 - delta + zeta * delta;
    const double ratio = zeta * delta / (1 - delta + zeta * delta);
    Y1Value best;
    for (double al : frange(0.0, 1.0, grid.alpha_l_steps)) {
        const double left = std::pow(phi(al, cl), lnum);
        const double bound = ratio * al;
        if (method == Y1Method::Fast) {
            const double v = left * std::pow(phi(bound, cr), rnum);
            if (v > best.value) best = {v, al, bound};
            continue;
        }
        const int steps = std::max(1, grid.alpha_r_steps);
        for (int j = 0; j <= steps; ++j) {
            const double ar = j == steps ? bound : bound * static_cast<double>(j) / steps;
            const double v = left * std::pow(phi(ar, cr), rnum);
            if (v > best.value) best = {v, al, ar};
        }
    }
    return best;
}

double calc_Y2(double delta, double zeta) {
    const double rnum = 1 - delta + zeta * delta;
    return std::pow(1.5 + std::sqrt(5.0) / 2, rnum);
}

double calc_Y2_phi(double delta, double zeta, double c_prime) {
    const double rnum = 1 - delta + zeta * delta;
    return std::pow(phi(1.0 - 1.0 / std::sqrt(5.0), c_prime), rnum);
}

Argmax phi_argmax(double c, int steps) {
    Argmax best{0.0, 0.0};
    for (double a : frange(0.0, 1.0, steps)) {
        if (a >= c && a < 1.0) break;
        const double v = phi(a, c);
        if (v > best.value) best = {a, v};
    }
    return best;
}

double calc_Y3(double delta, double zeta) {
    const double x = (1 - zeta) * delta;
    return std::pow(std::pow(zeta, zeta) * std::pow(1 - zeta, 1 - zeta), delta) / std::pow(x, x) /
           std::pow(1 - x, 1 - x);
}

double special_case_bound(double delta, double zeta, double cr, double c_prime) {
    const double rnum = 1 - delta + zeta * delta;
    const double a = zeta * delta / rnum;
    if (!(a >= 0.0) || a >= cr || a >= c_prime)
        throw AnalysisDomainError("special_case_bound: alpha must be below c_r and c'");
    const double base = cr * std::pow(c_prime, 1 - a) /
                        (std::pow(a, a) * std::pow(cr - a, 1 - a) * std::pow(c_prime - a, 1 - a));
    return std::pow(base, rnum);
}

GridRange parse_range(const std::string& text) {
    auto fail = [&]() -> GridRange {
        throw std::invalid_argument("malformed range '" + text + "' (expected lo:hi:steps)");
    };
    const auto p1 = text.find(':');
    const auto p2 = p1 == std::string::npos ? p1 : text.find(':', p1 + 1);
    if (p2 == std::string::npos || text.find(':', p2 + 1) != std::string::npos) return fail();
    GridRange r;
    auto parse_double = [&](std::string_view s, double& out) {
        auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
    };
    std::string_view sv(text);
    if (!parse_double(sv.substr(0, p1), r.lo) || !parse_double(sv.substr(p1 + 1, p2 - p1 - 1), r.hi)) return fail();
    auto steps = sv.substr(p2 + 1);
    auto res = std::from_chars(steps.data(), steps.data() + steps.size(), r.steps);
    if (res.ec != std::errc() || res.ptr != steps.data() + steps.size() || r.steps < 0 || r.hi < r.lo) return fail();
    if (r.lo == r.hi) r.steps = 0;
    if (r.steps == 0 && r.lo != r.hi) return fail();
    return r;
}

OptResult bisect_point(double cl, double cr, double zeta, const OptGrid& grid) {
    if (grid.iterations < 1) throw std::invalid_argument("bisection needs at least one iteration");
    double da = grid.delta_lo, db = grid.delta_hi;
    double delta = 0, y1 = 0, y2 = 0;
    Y1Value best;
    for (int i = 0; i < grid.iterations; ++i) {
        delta = (da + db) / 2;
        best = calc_Y1(delta, zeta, cl, cr, Y1Method::Fast, {grid.alpha_steps, 0});
        y1 = best.value;
        y2 = calc_Y2(delta, zeta);
        if (y1 > y2)
            db = delta;
        else
            da = delta;
    }
    OptResult r;
    r.cl = cl;
    r.cr = cr;
    r.zeta = zeta;
    r.delta = delta;
    r.y1 = y1;
    r.y2 = y2;
    r.y3 = calc_Y3(delta, zeta);
    r.best_Y = y1 * r.y3;
    r.alpha_l = best.alpha_l;
    r.alpha_r = best.alpha_r;
    r.cells = 1;
    r.grid = grid;
    return r;
}

namespace {

struct CellOutcome {
    double y = 0.0;
    double delta = 0.0;
};

// Log-domain evaluation of the fast Y1 maximum. Only the comparison against Y2 and
// the final product leave the log domain.
class Kernel {
public:
    Kernel(const OptGrid& grid, const std::vector<double>& cls) : grid_(grid) {
        alpha_ = frange(0.0, 1.0, grid.alpha_steps);
        ln_alpha_.resize(alpha_.size());
        for (std::size_t i = 0; i < alpha_.size(); ++i) ln_alpha_[i] = i == 0 ? 0.0 : std::log(alpha_[i]);
        ln_phi_cl_.resize(cls.size());
        for (std::size_t c = 0; c < cls.size(); ++c) {
            auto& row = ln_phi_cl_[c];
            row.resize(alpha_.size());
            for (std::size_t i = 0; i < alpha_.size(); ++i) row[i] = std::log(phi(alpha_[i], cls[c]));
        }
    }

    double y1(std::size_t cl_index, double cr, double delta, double zeta) const {
        const double lnum = (1 - zeta) * delta;
        const double rnum = 1 - delta + zeta * delta;
        const double ratio = zeta * delta / (1 - delta + zeta * delta);
        const double ln_ratio = ratio > 0 ? std::log(ratio) : 0.0;
        const double ln_cr = std::log(cr);
        const auto& lpl = ln_phi_cl_[cl_index];
        double best = -INFINITY;
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            const double ar = ratio * alpha_[i];
            const double a_ln_a = ar > 0 ? ar * (ln_ratio + ln_alpha_[i]) : 0.0;
            const double ln_phi_r = (2 - ar) * ln_cr - a_ln_a - (2 - 2 * ar) * std::log(cr - ar);
            const double e = lnum * lpl[i] + rnum * ln_phi_r;
            if (e > best) best = e;
        }
        return std::exp(best);
    }

    CellOutcome cell(std::size_t cl_index, double cr, double zeta) const {
        double da = grid_.delta_lo, db = grid_.delta_hi;
        double delta = 0, y1v = 0;
        for (int i = 0; i < grid_.iterations; ++i) {
            delta = (da + db) / 2;
            y1v = y1(cl_index, cr, delta, zeta);
            if (y1v > calc_Y2(delta, zeta))
                db = delta;
            else
                da = delta;
        }
        return {y1v * calc_Y3(delta, zeta), delta};
    }

private:
    const OptGrid& grid_;
    std::vector<double> alpha_, ln_alpha_;
    std::vector<std::vector<double>> ln_phi_cl_;
};

void check_grid(const OptGrid& grid) {
    if (grid.iterations < 1) throw std::invalid_argument("bisection needs at least one iteration");
    if (grid.alpha_steps < 1) throw std::invalid_argument("alpha grid needs at least one step");
    if (!(grid.cl.lo >= 1.0) || !(grid.cr.lo >= 1.0))
        throw AnalysisDomainError("trade-off constants c_l and c_r must be at least 1");
    if (!(grid.zeta.lo > 0.0) || !(grid.zeta.hi < 1.0)) throw AnalysisDomainError("zeta must lie in (0, 1)");
    if (!(grid.delta_lo > 0.0) || !(grid.delta_hi < 1.0) || grid.delta_hi < grid.delta_lo)
        throw AnalysisDomainError("delta interval must lie in (0, 1)");
}

}  // namespace

OptResult optimize(const OptGrid& grid, int threads) {
    check_grid(grid);
    const auto cls = grid.cl.values(), crs = grid.cr.values(), zetas = grid.zeta.values();
    const Kernel kernel(grid, cls);
    const std::size_t per_cl = crs.size() * zetas.size();
    const std::size_t total = cls.size() * per_cl;
    std::vector<CellOutcome> cells(total);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (long long t = 0; t < static_cast<long long>(total); ++t) {
        const auto i = static_cast<std::size_t>(t);
        try {
            cells[i] = kernel.cell(i / per_cl, crs[(i % per_cl) / zetas.size()], zetas[i % zetas.size()]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    double best = 1e10;
    std::size_t arg = total;
    for (std::size_t i = 0; i < total; ++i)
        if (cells[i].y < best) {
            best = cells[i].y;
            arg = i;
        }
    OptResult r;
    r.cells = total;
    r.grid = grid;
    if (arg == total) return r;
    r.best_Y = best;
    r.cl = cls[arg / per_cl];
    r.cr = crs[(arg % per_cl) / zetas.size()];
    r.zeta = zetas[arg % zetas.size()];
    r.delta = cells[arg].delta;
    const Y1Value y1 = calc_Y1(r.delta, r.zeta, r.cl, r.cr, Y1Method::Fast, {grid.alpha_steps, 0});
    r.y1 = y1.value;
    r.alpha_l = y1.alpha_l;
    r.alpha_r = y1.alpha_r;
    r.y2 = calc_Y2(r.delta, r.zeta);
    r.y3 = calc_Y3(r.delta, r.zeta);
    return r;
}

OptResult optimize_reference(const OptGrid& grid) {
    check_grid(grid);
    OptResult best;
    best.grid = grid;
    std::size_t cells = 0;
    for (double cl : grid.cl.values())
        for (double cr : grid.cr.values())
            for (double zeta : grid.zeta.values()) {
                ++cells;
                OptResult r = bisect_point(cl, cr, zeta, grid);
                if (r.best_Y < best.best_Y) best = r;
            }
    best.cells = cells;
    return best;
}

nlohmann::json to_json(const OptResult& r) {
    auto range = [](const GridRange& g) { return nlohmann::json{{"lo", g.lo}, {"hi", g.hi}, {"steps", g.steps}}; };
    return {{"best_Y", r.best_Y},
            {"cl", r.cl},
            {"cr", r.cr},
            {"zeta", r.zeta},
            {"delta", r.delta},
            {"Y1", r.y1},
            {"Y2", r.y2},
            {"Y3", r.y3},
            {"alpha_l", r.alpha_l},
            {"alpha_r", r.alpha_r},
            {"cells", r.cells},
            {"grid",
             {{"cl", range(r.grid.cl)},
              {"cr", range(r.grid.cr)},
              {"zeta", range(r.grid.zeta)},
              {"delta", {r.grid.delta_lo, r.grid.delta_hi}},
              {"iterations", r.grid.iterations},
              {"alpha_steps", r.grid.alpha_steps}}}};
}

std::string to_plain(const OptResult& r) {
    auto shortest = [](double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    char head[32];
    std::snprintf(head, sizeof head, "%.12g", r.best_Y);
    std::ostringstream out;
    out << head << "\n[" << shortest(r.cl) << ", " << shortest(r.cr) << ", " << shortest(r.zeta) << ", "
        << shortest(r.delta) << "]\n";
    return out.str();
}

}  // namespace kpath
