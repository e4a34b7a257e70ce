#include "circlelab/numeric_core.hpp"

#include <cmath>

namespace circlelab {

// ---------------------------------------------------------------------------
// isqrt

u64 isqrt(u64 n) {
    if (n == 0) return 0;
    // double sqrt is within +-1 ulp; fix up with exact 128-bit comparisons.
    u64 s = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (s > 0 && (u128)s * s > n) --s;
    while ((u128)(s + 1) * (s + 1) <= n) ++s;
    return s;
}

u128 isqrt(u128 n) {
    if (n == 0) return 0;
    long double d = sqrtl(static_cast<long double>(n));
    u128 x = static_cast<u128>(d);
    if (x == 0) x = 1;
    // Newton from either side, then exact fix-up via division (x*x can
    // overflow u128 near 2^127, x <= n/x cannot).
    for (int i = 0; i < 4; ++i) {
        u128 y = (x + n / x) >> 1;
        if (y >= x) break;
        x = y;
    }
    while (x > 1 && x > n / x) --x;
    while ((x + 1) <= n / (x + 1)) ++x;
    return x;
}

// ---------------------------------------------------------------------------
// frac_sqrt: f = (n - s^2) / (s + sqrt(n)), polished by f <- d / (2s + f).
// The defect d = n - s^2 is exact; two fixed-point passes give full double
// (resp. long double) accuracy of the fractional part.

ExactSqrt frac_sqrt(u64 n) {
    ExactSqrt r;
    r.n = n;
    u64 s = isqrt(n);
    r.s = s;
    u64 d = n - s * s; // d <= 2s <= 2e9 for n <= 1e18: exact in double
    if (d == 0) {
        r.f = 0.0;
        return r;
    }
    // seed f = d/(s + sqrt(n)) (relative ~1e-16), then contract with
    // f <- d/(2s + f); the contraction factor is f/(2s+f) < 0.21 always.
    double fd = static_cast<double>(d);
    double s2 = 2.0 * static_cast<double>(s);
    double f = fd / (static_cast<double>(s) + std::sqrt(static_cast<double>(n)));
    f = fd / (s2 + f);
    f = fd / (s2 + f);
    r.f = f;
    return r;
}

ExactSqrt frac_sqrt(u128 n) {
    ExactSqrt r;
    r.n = n;
    u128 s = isqrt(n);
    r.s = s;
    u128 d = n - s * s; // d <= 2s < 2^65: exact in long double (64-bit mantissa)
    if (d == 0) {
        r.f = 0.0;
        return r;
    }
    long double fd = static_cast<long double>(d);
    long double s2 = 2.0L * static_cast<long double>(s);
    long double f = fd / (static_cast<long double>(s) + sqrtl(static_cast<long double>(n)));
    f = fd / (s2 + f);
    f = fd / (s2 + f);
    r.f = static_cast<double>(f);
    return r;
}

// ---------------------------------------------------------------------------
// phases

double frac_part(double x) {
    double y = x - std::floor(x);
    if (y >= 1.0) y = 0.0; // floor rounding at tiny negative x
    if (y < 0.0) y += 1.0;
    return y;
}

Phase phase_of(u64 r, const ExactSqrt& root) {
    // r * (s + f) mod 1 = r*f mod 1 exactly; split r*f into rounded product
    // plus fma remainder so the reduction loses nothing.
    double rd = static_cast<double>(r);
    double p = rd * root.f;
    double e = std::fma(rd, root.f, -p);
    double v = frac_part(frac_part(p) + e);
    return Phase{v};
}

ComplexValue unit_exp(double x) {
    double th = frac_part(x);
    if (th >= 0.5) th -= 1.0; // evaluate on [-1/2,1/2) for trig accuracy
    double a = 2.0 * M_PI * th;
    return ComplexValue(std::cos(a), std::sin(a));
}

double psi(double u) { return u - std::floor(u) - 0.5; }

// ---------------------------------------------------------------------------

double compensated_sum(const std::vector<double>& xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

} // namespace circlelab
