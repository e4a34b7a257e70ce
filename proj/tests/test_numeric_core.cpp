#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "circlelab/numeric_core.hpp"

#include <cmath>
#include <random>

using namespace circlelab;

// ---------------------------------------------------------------------------
// isqrt

TEST_CASE("isqrt fixed values") {
    CHECK(isqrt(u64(0)) == 0);
    CHECK(isqrt(u64(1)) == 1);
    CHECK(isqrt(u64(24)) == 4);
    CHECK(isqrt(u64(25)) == 5);
    CHECK(isqrt(u64(26)) == 5);
    CHECK(isqrt(u64(1000000000000000000ull)) == 1000000000ull);
}

TEST_CASE("isqrt exhaustive small") {
    u64 s = 0;
    for (u64 n = 0; n <= 1000000; ++n) {
        while ((s + 1) * (s + 1) <= n) ++s;
        REQUIRE(isqrt(n) == s);
    }
}

TEST_CASE("isqrt u64 boundary values") {
    u64 m = 4294967295ull; // isqrt(2^64 - 1)
    CHECK(isqrt(~u64(0)) == m);
    CHECK(isqrt(m * m) == m);
    CHECK(isqrt(m * m - 1) == m - 1);
    CHECK(isqrt(m * m + 1) == m);
}

TEST_CASE("isqrt sandwich property, random") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<u64> dist(0, 1000000000000ull);
    for (int i = 0; i < 20000; ++i) {
        u64 n = dist(rng);
        u64 s = isqrt(n);
        REQUIRE(s * s <= n);
        REQUIRE((s + 1) * (s + 1) > n);
    }
}

TEST_CASE("isqrt u128 fixed and random") {
    CHECK(isqrt(u128(0)) == 0);
    CHECK(isqrt(u128(24)) == 4);
    u128 big = (u128(1) << 126);
    CHECK(isqrt(big) == (u128(1) << 63));
    CHECK(isqrt(big - 1) == (u128(1) << 63) - 1);

    std::mt19937_64 rng(777);
    for (int i = 0; i < 5000; ++i) {
        u128 n = (u128(rng()) << 60) ^ rng();
        u128 s = isqrt(n);
        REQUIRE(s <= n / (s ? s : 1));
        REQUIRE((s + 1) > n / (s + 1));
    }
}

// ---------------------------------------------------------------------------
// frac_sqrt

TEST_CASE("frac_sqrt perfect squares give f = 0 exactly") {
    for (u64 k : {0ull, 1ull, 2ull, 5ull, 100000ull, 999999999ull}) {
        auto r = frac_sqrt(k * k);
        CHECK(r.s == k);
        CHECK(r.f == 0.0);
    }
}

TEST_CASE("frac_sqrt fixed values") {
    auto r2 = frac_sqrt(u64(2));
    CHECK(r2.s == 1);
    CHECK(std::abs(r2.f - 0.41421356237309504880) <= 1e-16);

    // n = 10^10 + 1: f = 1/(10^5 + sqrt(10^10+1)) = 5e-6 * (1 - 2.5e-11)
    auto rb = frac_sqrt(u64(10000000001ull));
    CHECK(rb.s == 100000);
    CHECK(std::abs(rb.f - 4.999999999875e-06) <= 1e-18);
}

TEST_CASE("frac_sqrt reconstruction property") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<u64> dist(1, 1000000000000ull);
    for (int i = 0; i < 20000; ++i) {
        u64 n = dist(rng);
        auto r = frac_sqrt(n);
        long double v = (long double)r.s + (long double)r.f;
        long double defect = v * v - (long double)n;
        REQUIRE(std::abs((double)defect) <= 1e-9 * std::sqrt((double)n) + 1e-12);
        REQUIRE(r.f >= 0.0);
        REQUIRE(r.f < 1.0);
    }
}

TEST_CASE("frac_sqrt u128 path agrees with u64 path and extends") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<u64> dist(1, 1000000000000ull);
    for (int i = 0; i < 5000; ++i) {
        u64 n = dist(rng);
        auto a = frac_sqrt(n);
        auto b = frac_sqrt(u128(n));
        REQUIRE(a.s == b.s);
        REQUIRE(std::abs(a.f - b.f) <= 1e-15);
    }
    // 2^80 + 3: fractional part from the exact defect over (s + sqrt(n))
    u128 n = (u128(1) << 80) + 3;
    auto r = frac_sqrt(n);
    u128 d = n - r.s * r.s;
    long double f0 = (long double)d / (2.0L * (long double)r.s + (long double)r.f);
    CHECK(std::abs((double)(r.f - f0)) <= 1e-15);
}

// ---------------------------------------------------------------------------
// phase_of

TEST_CASE("phase_of fixed values") {
    CHECK(phase_of(7, frac_sqrt(u64(9))).value == 0.0);
    auto p = phase_of(2, frac_sqrt(u64(2)));
    CHECK(std::abs(p.value - 0.82842712474619009760) <= 1e-14);
    ExactSqrt quarter{0, 0, 0.25};
    CHECK(phase_of(1, quarter).value == 0.25);
}

TEST_CASE("phase_of equals frac(sqrt(r^2 n)) across independent code path") {
    // frac(r sqrt(n)) = frac(sqrt(r^2 n)); the right side goes through the
    // 128-bit root of r^2 n, a different split than r * frac_sqrt(n).
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<u64> ndist(2, 1000000000000ull);
    std::uniform_int_distribution<u64> rdist(1, 1000000);
    for (int i = 0; i < 5000; ++i) {
        u64 n = ndist(rng);
        u64 r = rdist(rng);
        auto ph = phase_of(r, frac_sqrt(n));
        auto other = frac_sqrt(u128(n) * r * r);
        double tol = (double)r * 1e-15 + 1e-12;
        double d = std::abs(ph.value - other.f);
        d = std::min(d, 1.0 - d); // mod-1 distance
        REQUIRE(d <= tol);
    }
}

TEST_CASE("phase_of matches direct long-double evaluation at small scale") {
    for (u64 n = 2; n < 400; ++n) {
        if (isqrt(n) * isqrt(n) == n) continue;
        for (u64 r : {1ull, 2ull, 3ull, 7ull, 19ull, 50ull}) {
            long double x = (long double)r * sqrtl((long double)n);
            double direct = (double)(x - floorl(x));
            auto ph = phase_of(r, frac_sqrt(n));
            double d = std::abs(ph.value - direct);
            d = std::min(d, 1.0 - d);
            REQUIRE(d <= 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// unit_exp / psi

TEST_CASE("unit_exp fixed values") {
    auto e0 = unit_exp(0.0);
    CHECK(e0.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(e0.imag()) <= 1e-15);
    auto eh = unit_exp(0.5);
    CHECK(eh.real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(eh.imag()) <= 1e-12);
    auto ee = unit_exp(0.125);
    CHECK(std::abs(ee.real() - std::sqrt(0.5)) <= 1e-15);
    CHECK(std::abs(ee.imag() - std::sqrt(0.5)) <= 1e-15);
}

TEST_CASE("unit_exp group properties") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        double x = dist(rng);
        auto a = unit_exp(x);
        CHECK(std::abs(std::abs(a) - 1.0) <= 1e-14);
        auto b = unit_exp(-x);
        CHECK(std::abs(a * b - ComplexValue(1, 0)) <= 1e-12);
        auto c = unit_exp(x + 0.5);
        CHECK(std::abs(c + a) <= 1e-12);
    }
}

TEST_CASE("psi fixed values and periodicity") {
    CHECK(psi(3.0) == -0.5);
    CHECK(psi(0.0) == -0.5);
    CHECK(psi(0.5) == 0.0);
    CHECK(psi(2.75) == 0.25);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double u = dist(rng) * 50 - 25;
        CHECK(std::abs(psi(u + 1.0) - psi(u)) <= 1e-12);
        CHECK(psi(u) >= -0.5);
        CHECK(psi(u) < 0.5);
    }
}

TEST_CASE("frac_part") {
    CHECK(frac_part(1.25) == 0.25);
    CHECK(frac_part(-0.25) == 0.75);
    CHECK(frac_part(3.0) == 0.0);
    CHECK(frac_part(-1e-18) < 1.0); // floor rounding guard
}

// ---------------------------------------------------------------------------
// compensated summation

TEST_CASE("compensated_sum catches the classic cancellation case") {
    CHECK(compensated_sum({1.0, 1e-16, -1.0}) == 1e-16);
    CHECK(compensated_sum({}) == 0.0);
}

TEST_CASE("compensated_sum a million tenths") {
    std::vector<double> xs(1000000, 0.1);
    CHECK(std::abs(compensated_sum(xs) - 100000.0) <= 1e-9);
}

TEST_CASE("compensated_sum no worse than long double accumulation") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> xs(50000);
    long double ref = 0;
    for (auto& x : xs) {
        x = dist(rng) * std::pow(10.0, (int)(dist(rng) * 8));
        ref += (long double)x;
    }
    double got = compensated_sum(xs);
    CHECK(std::abs((double)((long double)got - ref)) <= 1e-9 * std::max(1.0, std::abs((double)ref)));
}
