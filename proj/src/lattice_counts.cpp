#include "circlelab/lattice_counts.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circlelab {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

void require_budget(u64 t, u64 cap, const char* what) {
    if (t > cap)
        throw std::out_of_range(std::string(what) + ": t = " + std::to_string(t) +
                                " exceeds the supported bound " + std::to_string(cap));
}

} // namespace

// ---------------------------------------------------------------------------

CircleCount count_lattice_points(u64 t) {
    require_budget(t, 1000000000000ull, "count_lattice_points");
    CircleCount out;
    out.t = t;
    u64 s = isqrt(t);
    u64 rows = 0;
    for (u64 x = 1; x <= s; ++x) rows += isqrt(t - x * x);
    out.p = 1 + 4 * s + 4 * rows;
    out.delta = static_cast<double>(static_cast<long double>(out.p) -
                                    kPi * static_cast<long double>(t));
    return out;
}

u64 brute_force_count(u64 t) {
    require_budget(t, 100000000ull, "brute_force_count");
    if (t == 0) return 1;
    // Quadrant x >= 1, y >= 1 counted once, then 4-fold symmetry plus axes.
    // The inner scan uses only additions: (y+1)^2 = y^2 + 2y + 1.
    u64 quad = 0;
    u64 axis = 0; // points (x, 0), x >= 1
    for (u64 x = 1; x * x <= t; ++x) ++axis;
    for (u64 x = 1; x * x <= t; ++x) {
        u64 rem = t - x * x;
        u64 y = 0, ysq = 0;
        while (ysq + 2 * y + 1 <= rem) {
            ysq += 2 * y + 1;
            ++y;
        }
        quad += y;
    }
    return 1 + 4 * axis + 4 * quad;
}

// ---------------------------------------------------------------------------

PsiSumResult psi_sum(u64 t) {
    require_budget(t, 1000000000000ull, "psi_sum");
    PsiSumResult out;
    out.t = t;
    u64 a = isqrt(t >> 1); // floor(sqrt(t/2)) = isqrt(floor(t/2)) exactly
    NeumaierSum acc;
    for (u64 m = 0; m <= a; ++m) {
        auto root = frac_sqrt(t - m * m);
        acc.add(root.f - 0.5); // psi(sqrt(.)) with psi = -1/2 at integers
    }
    out.sum = acc.value();
    long double p = static_cast<long double>(count_lattice_points(t).p);
    out.residual = static_cast<double>(
        static_cast<long double>(out.sum) -
        (kPi * static_cast<long double>(t) - p) / 8.0L);
    return out;
}

// ---------------------------------------------------------------------------

u64 pick_triangle_check(u64 a) {
    u64 count = 0;
    for (u64 x = 0; x <= a; ++x)
        for (u64 y = 0; y <= x; ++y) ++count;
    // area a^2/2, boundary 3a, so count = a^2/2 + (3/2)a + 1
    if (2 * count != a * a + 3 * a + 2)
        throw std::logic_error("pick_triangle_check: count does not match (a+1)(a+2)/2");
    return count;
}

u64 sector_count(u64 t) {
    require_budget(t, 10000000000ull, "sector_count");
    u64 total = 0;
    for (u64 x = 0;; ++x) {
        if (x * x > t) break;
        u64 ymax = isqrt(t - x * x);
        if (ymax <= x) break; // rows below the diagonal contribute nothing further
        total += ymax - x;
    }
    return total;
}

double sector_decomposition_defect(u64 t) {
    u64 l1 = sector_count(t);
    u64 p = count_lattice_points(t).p;
    long double v = 8.0L * static_cast<long double>(l1) +
                    4.0L * sqrtl(static_cast<long double>(t) / 2.0L) -
                    4.0L * sqrtl(static_cast<long double>(t)) -
                    static_cast<long double>(p);
    return std::abs(static_cast<double>(v));
}

} // namespace circlelab
