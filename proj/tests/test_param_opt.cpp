#include <cmath>
#include <random>

#include "doctest.h"
#include "kpath/cut_kpath.hpp"
#include "kpath/param_opt.hpp"

using namespace kpath;

namespace {

const double kRefDelta = 0.49533, kRefZeta = 0.712, kRefCl = 1.136, kRefCr = 1.645;

// Same expression written through logarithms, with 0 log 0 = 0.
double y3_via_logs(double delta, double zeta) {
    auto xlx = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); };
    const double x = (1 - zeta) * delta;
    return std::exp(delta * (xlx(zeta) + xlx(1 - zeta)) - xlx(x) - xlx(1 - x));
}

}  // namespace

TEST_CASE("phi golden values") {
    for (double c : {1.0, 1.2, kGoldenC, 2.0, 5.0}) CHECK(phi(0.0, c) == 1.0);
    CHECK(std::abs(phi(1 - 1 / std::sqrt(5.0), kGoldenC) - (1.5 + std::sqrt(5.0) / 2)) < 1e-9);
    CHECK(phi(1.0 / 3.0, kGoldenC) <= 2.313);
    CHECK(phi(1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(phi(-0.1, 2.0), AnalysisDomainError);
    CHECK_THROWS_AS(phi(1.1, 2.0), AnalysisDomainError);
    CHECK_THROWS_AS(phi(0.5, 0.9), AnalysisDomainError);
}

TEST_CASE("phi is finite, at least 1, and peaks at 1 - 1/sqrt(5)") {
    for (double c : {1.05, 1.3, kGoldenC, 1.645, 3.0})
        for (int i = 0; i < 10000; ++i) {
            const double a = static_cast<double>(i) / 10000.0;
            const double v = phi(a, c);
            CHECK(std::isfinite(v));
            if (c >= kGoldenC) CHECK(v >= 1.0);
        }
    Argmax best = phi_argmax(kGoldenC, 100000);
    CHECK(std::abs(best.alpha - (1 - 1 / std::sqrt(5.0))) < 1e-4);
    CHECK(best.alpha == doctest::Approx(0.553).epsilon(1e-3));
}

TEST_CASE("Y1 fast and exhaustive agree where the boundary stays below 1/2") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u01(0.05, 0.95), uc(1.0, 1.8);
    int points = 0;
    while (points < 40) {
        const double delta = u01(rng), zeta = u01(rng), cl = uc(rng), cr = uc(rng);
        if (zeta * delta / (1 - delta + zeta * delta) > 0.5) continue;
        ++points;
        const auto fast = calc_Y1(delta, zeta, cl, cr, Y1Method::Fast);
        const auto full = calc_Y1(delta, zeta, cl, cr, Y1Method::Exhaustive);
        CHECK(std::abs(fast.value - full.value) < 1e-6);
    }
    CHECK(calc_Y1(1e-12, 0.5, 1.2, 1.6).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Y1 maximizers at the reference parameters") {
    const auto y1 = calc_Y1(kRefDelta, kRefZeta, kRefCl, kRefCr);
    CHECK(std::abs(y1.alpha_l - 0.864) < 1e-3);
    CHECK(std::abs(y1.alpha_r - 0.356) < 1e-3);
}

TEST_CASE("Y2 closed form and limits") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double d = u(rng), z = u(rng);
        CHECK(std::abs(calc_Y2(d, z) - calc_Y2_phi(d, z, kGoldenC)) < 1e-9);
    }
    CHECK(calc_Y2(kRefDelta, kRefZeta) == doctest::Approx(2.2822).epsilon(1e-4));
    CHECK(calc_Y2(0.0, 0.3) == doctest::Approx(kGoldenSquare).epsilon(1e-15));
    CHECK(calc_Y2(0.4, 1.0) == doctest::Approx(kGoldenSquare).epsilon(1e-15));
}

TEST_CASE("Y3 matches a logarithmic evaluation and its limits") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 100; ++i) {
        const double d = u(rng), z = u(rng);
        CHECK(std::abs(calc_Y3(d, z) - y3_via_logs(d, z)) < 1e-12);
    }
    CHECK(calc_Y3(0.0, 0.4) == 1.0);
    CHECK(std::isfinite(calc_Y3(0.5, 0.0)));
    CHECK(std::isfinite(calc_Y3(0.5, 1.0)));
}

TEST_CASE("special case bound") {
    CHECK(special_case_bound(kRefDelta, kRefZeta, kRefCr, kGoldenC) < calc_Y2(kRefDelta, kRefZeta));
    CHECK(std::isfinite(special_case_bound(0.5, 0.0, kRefCr, kGoldenC)));
    CHECK(std::isfinite(special_case_bound(0.5, 1e-9, kRefCr, kGoldenC)));
    // the bracketed base grows with alpha near 0: sweep zeta at fixed delta, undoing the exponent
    const double delta = 0.5;
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double zeta = 0.002 * i;
        const double rnum = 1 - delta + zeta * delta;
        const double base = std::pow(special_case_bound(delta, zeta, kRefCr, kGoldenC), 1.0 / rnum);
        CHECK(base > prev);
        prev = base;
    }
}

TEST_CASE("bisection at the reference point") {
    OptGrid grid;
    const OptResult r = bisect_point(kRefCl, kRefCr, kRefZeta, grid);
    CHECK(std::abs(r.y1 - r.y2) < 1e-6);
    CHECK(r.best_Y < 2.5537);
    CHECK(std::abs(r.delta - kRefDelta) < 1e-3);
    CHECK(std::max(r.y1, r.y2) * r.y3 < 2.5537);
}

TEST_CASE("one-point grid reproduces the point evaluation") {
    OptGrid grid;
    grid.cl = parse_range("1.136:1.136:1");
    grid.cr = parse_range("1.645:1.645:1");
    grid.zeta = parse_range("0.712:0.712:1");
    const OptResult a = optimize(grid, 1);
    const OptResult b = bisect_point(kRefCl, kRefCr, kRefZeta, grid);
    CHECK(a.cells == 1);
    CHECK(a.best_Y == doctest::Approx(b.best_Y).epsilon(1e-12));
    CHECK(a.delta == b.delta);
    CHECK(a.best_Y < 2.5537);
}

TEST_CASE("log-domain optimizer matches the reference and ignores thread count") {
    OptGrid grid;
    grid.cl = {1.10, 1.16, 3};
    grid.cr = {1.62, 1.68, 3};
    grid.zeta = {0.68, 0.74, 3};
    const OptResult fast = optimize(grid, 1);
    const OptResult ref = optimize_reference(grid);
    CHECK(fast.best_Y == doctest::Approx(ref.best_Y).epsilon(1e-12));
    CHECK(fast.cl == ref.cl);
    CHECK(fast.cr == ref.cr);
    CHECK(fast.zeta == ref.zeta);
    CHECK(fast.delta == ref.delta);
    const OptResult par = optimize(grid, 3);
    CHECK(to_json(par).dump() == to_json(fast).dump());
    CHECK(fast.cells == 64);
}

TEST_CASE("grid ranges") {
    CHECK(frange(0.1, 0.9, 80).size() == 81);
    CHECK(frange(0.1, 0.9, 80)[80] == doctest::Approx(0.9));
    GridRange r = parse_range("1.0:1.4:40");
    CHECK(r.steps == 40);
    CHECK(r.step() == doctest::Approx(0.01));
    CHECK(parse_range("0.712:0.712:1").values().size() == 1);
    CHECK_THROWS_AS(parse_range("1.0:1.4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1.4:1.0:3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1:2:-1"), std::invalid_argument);
}

TEST_CASE("plain output has two lines") {
    OptResult r;
    r.best_Y = 2.5536;
    r.cl = 1.14;
    r.cr = 1.65;
    r.zeta = 0.71;
    r.delta = 0.5;
    CHECK(to_plain(r) == "2.5536\n[1.14, 1.65, 0.71, 0.5]\n");
}
