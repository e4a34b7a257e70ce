#include "circlelab/psi_fourier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circlelab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double sin_two_pi(double revs) {
    double th = frac_part(revs);
    if (th >= 0.5) th -= 1.0;
    return std::sin(kTwoPi * th);
}

void require_t(u64 t, const char* what) {
    if (t > 1000000000000ull)
        throw std::out_of_range(std::string(what) + ": t = " + std::to_string(t) +
                                " exceeds the supported bound 1e12");
}

} // namespace

// ---------------------------------------------------------------------------

double truncated_fourier_sum(u64 t, u64 R) {
    require_t(t, "truncated_fourier_sum");
    if (R == 0) throw std::out_of_range("truncated_fourier_sum: R must be >= 1");
    u64 a = isqrt(t >> 1);
    NeumaierSum acc;
    for (u64 m = 0; m <= a; ++m) {
        auto root = frac_sqrt(t - m * m);
        for (u64 r = 1; r <= R; ++r) {
            double ph = phase_of(r, root).value;
            acc.add(sin_two_pi(ph) / static_cast<double>(r));
        }
    }
    return -acc.value() / M_PI;
}

// ---------------------------------------------------------------------------

AnnulusHistogram annulus_histogram(u64 t, u64 R) {
    require_t(t, "annulus_histogram");
    if (R == 0) throw std::out_of_range("annulus_histogram: R must be >= 1");
    AnnulusHistogram out;
    out.t = t;
    out.shells = R;
    u64 a = isqrt(t >> 1);
    for (u64 m = 0; m <= a; ++m) {
        auto root = frac_sqrt(t - m * m);
        u64 n = (root.f > 0.5) ? static_cast<u64>(root.s) + 1 : static_cast<u64>(root.s);
        // d = sqrt(m^2+n^2) - sqrt(t), exact numerator over a smooth denominator
        i128 num = static_cast<i128>(m) * m + static_cast<i128>(n) * n - static_cast<i128>(t);
        long double den = sqrtl(static_cast<long double>(m * m + n * n)) +
                          sqrtl(static_cast<long double>(t));
        long double d = static_cast<long double>(num) / den;
        long double kf = floorl(2.0L * static_cast<long double>(R) * d);
        i64 k = static_cast<i64>(kf);
        i64 lo = -static_cast<i64>(R), hi = static_cast<i64>(R) - 1;
        if (k < lo) k = lo;
        if (k > hi) k = hi;
        out.counts[k] += 1;
    }
    return out;
}

// ---------------------------------------------------------------------------

double tail_bound_check(u64 t, u64 R, double eps) {
    double gap = std::abs(psi_sum(t).sum - truncated_fourier_sum(t, R));
    double scale = std::pow(static_cast<double>(t), 0.5 + eps) / static_cast<double>(R);
    return gap / scale;
}

} // namespace circlelab
