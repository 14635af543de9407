#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kpath {

/// Argument outside the domain of an analysis formula.
class AnalysisDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kSqrt5 = 2.2360679774997896964;
/// 3/2 + sqrt(5)/2, the maximum of phi over alpha for c = 1 + 1/sqrt(5).
inline constexpr double kGoldenSquare = 1.5 + kSqrt5 / 2.0;

/// phi_c(alpha) = c^(2-alpha) / (alpha^alpha (c-alpha)^(2-2 alpha)), with 0^0 = 1.
/// Requires 0 <= alpha <= 1 <= c and alpha < c, except that alpha = c = 1 gives 1.
double phi(double alpha, double c);

/// a + (b-a) x / steps for x = 0..steps.
std::vector<double> frange(double a, double b, int steps);

enum class Y1Method { Fast, Exhaustive };

struct Y1Value {
    double value = 0.0;
    double alpha_l = 0.0;   // maximizer
    double alpha_r = 0.0;
};

struct Y1Grid {
    int alpha_l_steps = 1000;
    int alpha_r_steps = 300;   // exhaustive mode only
};

/// Max of phi_cl(a_l)^((1-zeta) delta) phi_cr(a_r)^(1-delta+zeta delta) over a_l on the
/// alpha_l grid. Fast: a_r on the boundary zeta delta/(1-delta+zeta delta) a_l.
/// Exhaustive: a_r ranges over [0, boundary] on its own grid, boundary included.
Y1Value calc_Y1(double delta, double zeta, double cl, double cr, Y1Method method = Y1Method::Fast,
                const Y1Grid& grid = {});

/// Closed form (3/2 + sqrt(5)/2)^(1-delta+zeta delta).
double calc_Y2(double delta, double zeta);
/// phi_c'(1 - 1/sqrt(5))^(1-delta+zeta delta).
double calc_Y2_phi(double delta, double zeta, double c_prime);

struct Argmax {
    double alpha = 0.0;
    double value = 0.0;
};
/// Grid maximizer of phi_c over [0, min(1, c)).
Argmax phi_argmax(double c, int steps = 100000);

/// (zeta^zeta (1-zeta)^(1-zeta))^delta / (x^x (1-x)^(1-x)) with x = (1-zeta) delta.
double calc_Y3(double delta, double zeta);

/// (c_r c'^(1-a) / (a^a (c_r-a)^(1-a) (c'-a)^(1-a)))^(1-delta+zeta delta) at
/// a = zeta delta / (1-delta+zeta delta).
double special_case_bound(double delta, double zeta, double cr, double c_prime);

struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
    std::vector<double> values() const { return frange(lo, hi, steps); }
    /// Spacing between neighbouring values (0 for a one-point grid).
    double step() const { return steps == 0 ? 0.0 : (hi - lo) / steps; }
};

/// Parses "lo:hi:steps". A one-point grid is written "v:v:0" or "v:v:1"; steps = 1
/// with lo = hi collapses to one point.
GridRange parse_range(const std::string& text);

struct OptGrid {
    GridRange cl{1.00, 1.40, 40};
    GridRange cr{1.40, 1.80, 40};
    GridRange zeta{0.10, 0.90, 80};
    double delta_lo = 0.25;
    double delta_hi = 0.75;
    int iterations = 30;
    int alpha_steps = 1000;
};

struct OptResult {
    double best_Y = 1e10;
    double cl = 0.0, cr = 0.0, zeta = 0.0, delta = 0.0;
    double y1 = 0.0, y2 = 0.0, y3 = 0.0;
    double alpha_l = 0.0, alpha_r = 0.0;
    std::size_t cells = 0;
    OptGrid grid;
};

/// Bisection on delta for one grid point, as in the grid search: Y1 > Y2 moves the
/// upper end down. Returns the last midpoint with Y1 and Y = Y1 Y3 there.
OptResult bisect_point(double cl, double cr, double zeta, const OptGrid& grid);

/// Grid search minimizing Y1 Y3 at the bisected delta; ties keep the earliest cell in
/// (cl, cr, zeta) order. Cells are evaluated in parallel with a log-domain kernel.
OptResult optimize(const OptGrid& grid = {}, int threads = 0);

/// Serial transliteration built on calc_Y1 / calc_Y2 / calc_Y3. Testing reference.
OptResult optimize_reference(const OptGrid& grid = {});

nlohmann::json to_json(const OptResult& r);
/// Two lines: best_Y, then [cl, cr, zeta, delta].
std::string to_plain(const OptResult& r);

}  // namespace kpath
