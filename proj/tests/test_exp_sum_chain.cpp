#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "circlelab/exp_sum_chain.hpp"
#include "circlelab/psi_fourier.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace circlelab;

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

// |e(a) - e(b)| from the wrapped phase distance.
double circ_gap(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    if (d > 0.5) d = 1.0 - d;
    return 2.0 * (double)sinl(kPi * (long double)d);
}

// Main-term value -r*nu*sqrt(t)/(r^2+nu^2)^{5/2} that G1/(-2) and G2 track.
double h_main(i64 r, u128 t, double nu) {
    long double B = (long double)r * r + (long double)nu * nu;
    return (double)(-(long double)r * nu * sqrtl((long double)t) / powl(B, 2.5L));
}

double sq(double v) { return v * v; }

// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = (double)xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

// ---------------------------------------------------------------------------
// direct sum

TEST_CASE("direct_sum matches a term-by-term long-double oracle") {
    // Frozen oracle value for (r, t) = (2, 100), independently recomputed below.
    ComplexValue d = direct_sum(2, 100);
    CHECK(std::abs(d - ComplexValue(0.87357845428249692, 1.0383780125924498)) < 1e-14);

    for (auto [r, t] : std::vector<std::pair<i64, u64>>{{2, 100}, {3, 10000}, {7, 50000}}) {
        long double re = 0, im = 0;
        for (u64 m = 0; m * m * 2 <= t; ++m) {
            long double ph = 2.0L * kPi * (long double)r * sqrtl((long double)(t - m * m));
            re += cosl(ph);
            im += sinl(ph);
        }
        ComplexValue want((double)(re / r), (double)(im / r));
        CHECK(std::abs(direct_sum(r, t) - want) < 1e-9);
    }
}

TEST_CASE("direct_sum first term at square t is exactly 1/r") {
    // t = k^2: the m = 0 term is e(r*k)/r and the phase reduces to exactly 0.
    ExactSqrt s = frac_sqrt((u64)2500);
    CHECK(s.s == 50);
    CHECK(s.f == 0.0);
    CHECK(phase_of(7, s).value == 0.0);
}

TEST_CASE("imaginary parts of direct sums reproduce the sawtooth Fourier sum") {
    // sum_{r<=R} Im direct_sum(r,t) = sum_m sum_{r<=R} sin(2 pi r n_m)/r
    //                               = -pi * truncated_fourier_sum(t, R).
    u64 t = 12345;
    u64 R = 40;
    NeumaierSum acc;
    for (i64 r = 1; r <= (i64)R; ++r) acc.add(direct_sum(r, t).imag());
    CHECK(std::fabs(acc.value() + kPi * truncated_fourier_sum(t, R)) < 1e-12);
}

TEST_CASE("direct_sum rejects out-of-domain arguments") {
    CHECK_THROWS_AS(direct_sum(0, 100), std::out_of_range);
    CHECK_THROWS_AS(direct_sum(11, 100), std::out_of_range); // r^2 > t
    CHECK_THROWS_AS(direct_sum(2, 2000000000001ull), std::out_of_range);
}

// ---------------------------------------------------------------------------
// nodes

TEST_CASE("node fixed example r=5, t=1e6, nu=3") {
    Node nd = node(5, 1000000, 3);
    CHECK(nd.nu == 3);
    CHECK(nd.x == doctest::Approx(3.0 * 1000.0 / std::sqrt(34.0)).epsilon(1e-12));
    CHECK(nd.y == doctest::Approx(5.0 * 1000.0 / std::sqrt(34.0)).epsilon(1e-12));
    CHECK(nd.m_num == 1543); // floor(3 * 3000/sqrt(34))
    CHECK(nd.m == doctest::Approx(1543.0 / 3.0).epsilon(1e-15));
    CHECK(nd.lambda == doctest::Approx(nd.x - 1543.0 / 3.0).epsilon(1e-9));
    CHECK(nd.n == doctest::Approx(std::sqrt(1e6 - sq(1543.0 / 3.0))).epsilon(1e-12));
    CHECK(std::fabs(sq(nd.x) + sq(nd.y) - 1e6) / 1e6 < 1e-12);
}

TEST_CASE("node endpoints nu=0 and nu=r") {
    Node n0 = node(12, 500000, 0);
    CHECK(n0.x == 0.0);
    CHECK(n0.m == 0.0);
    CHECK(n0.lambda == 0.0);
    CHECK(n0.y == doctest::Approx(std::sqrt(500000.0)).epsilon(1e-14));
    CHECK(n0.n == doctest::Approx(std::sqrt(500000.0)).epsilon(1e-14));

    Node nr = node(12, 500000, 12);
    CHECK(nr.x == doctest::Approx(std::sqrt(250000.0)).epsilon(1e-14));
    CHECK(nr.x == doctest::Approx(nr.y).epsilon(1e-14));
}

TEST_CASE("node invariants: monotone x, spacing window, rational anchor") {
    for (auto [r, t] : std::vector<std::pair<i64, u128>>{
             {7, 10000}, {50, 100000000ull}, {316, (u128)10000000000ull}}) {
        double st = std::sqrt((double)(u64)t);
        double prev_x = 0.0;
        for (i64 nu = 0; nu <= r; ++nu) {
            Node nd = node(r, t, nu);
            if (nu >= 1) {
                double dx = nd.x - prev_x;
                // spacing window: sqrt(t)/(2 sqrt(2) r) <= dx <= sqrt(t)/r
                CHECK(dx * r / st >= 1.0 / (2.0 * std::sqrt(2.0)) - 1e-12);
                CHECK(dx * r / st <= 1.0 + 1e-12);
                CHECK(nd.lambda >= 0.0);
                CHECK(nd.lambda < 1.0 / (double)nu);
                CHECK(nd.m == doctest::Approx((double)nd.m_num / (double)nu).epsilon(1e-15));
            }
            CHECK(std::fabs(sq(nd.x) + sq(nd.y) - (double)(u64)t) / (double)(u64)t < 1e-9);
            CHECK(std::fabs(sq(nd.n) + sq(nd.m) - (double)(u64)t) / (double)(u64)t < 1e-9);
            prev_x = nd.x;
        }
    }
}

TEST_CASE("node rejects out-of-range nu") {
    CHECK_THROWS_AS(node(5, 1000000, -1), std::out_of_range);
    CHECK_THROWS_AS(node(5, 1000000, 6), std::out_of_range);
    CHECK_THROWS_AS(node(5, 16, 2), std::out_of_range); // r^2 > t
}

// ---------------------------------------------------------------------------
// derivative machinery

TEST_CASE("x_derivs matches the closed-form polynomial table") {
    i64 r = 37;
    u128 t = 100000000ull;
    double nu = 11.5;
    auto xd = x_derivs(r, t, nu, 5);
    long double r2 = (long double)r * r, B = r2 + (long double)nu * nu;
    long double st = sqrtl((long double)(u64)t);
    long double want[6] = {
        0.0L,
        st * r2 / powl(B, 1.5L),
        st * (-3.0L * r2 * nu) / powl(B, 2.5L),
        st * (3.0L * r2 * (4.0L * nu * nu - r2)) / powl(B, 3.5L),
        st * (15.0L * r2 * nu * (3.0L * r2 - 4.0L * nu * nu)) / powl(B, 4.5L),
        st * (45.0L * r2 * (r2 * r2 - 12.0L * r2 * nu * nu + 8.0L * powl(nu, 4.0L))) /
            powl(B, 5.5L),
    };
    for (int k = 1; k <= 5; ++k)
        CHECK(std::fabs((double)((xd[k] - want[k]) / want[k])) < 1e-12);
}

TEST_CASE("x_derivs agrees with Richardson-extrapolated finite differences") {
    i64 r = 37;
    u128 t = 100000000ull;
    auto x = [&](double nu) { return chain_x(r, t, nu); };
    for (double nu : {5.5, 11.5, 20.0, 30.0}) {
        auto xd = x_derivs(r, t, nu, 4);
        auto fd = [&](double h, int i) -> double {
            switch (i) {
            case 1: return (x(nu + h) - x(nu - h)) / (2 * h);
            case 2: return (x(nu + h) - 2 * x(nu) + x(nu - h)) / (h * h);
            case 3:
                return (x(nu + 2 * h) - 2 * x(nu + h) + 2 * x(nu - h) - x(nu - 2 * h)) /
                       (2 * h * h * h);
            default:
                return (x(nu + 2 * h) - 4 * x(nu + h) + 6 * x(nu) - 4 * x(nu - h) +
                        x(nu - 2 * h)) /
                       (h * h * h * h);
            }
        };
        for (int i = 1; i <= 4; ++i) {
            // central stencils have h^2 leading error; one Richardson step -> h^4
            double d = (4.0 * fd(0.25, i) - fd(0.5, i)) / 3.0;
            CHECK(std::fabs((d - (double)xd[i]) / (double)xd[i]) < 1e-5);
        }
    }
}

TEST_CASE("x derivative envelopes |x^(i)| <= D_i sqrt(t)/r^i") {
    // D_i from the extrema of the closed forms over nu in [0, r]:
    // sup of the scaled polynomial factors is 1, 0.86, 3, 8.07.
    const double D[5] = {0, 1.0, 1.0, 3.0, 8.5};
    for (auto [r, t] : std::vector<std::pair<i64, u128>>{{20, 1000000ull},
                                                         {100, (u128)10000000000ull}}) {
        double st = std::sqrt((double)(u64)t);
        for (double nu = 0.0; nu <= (double)r; nu += 0.25) {
            auto xd = x_derivs(r, t, nu, 4);
            for (int i = 1; i <= 4; ++i)
                CHECK(std::fabs((double)xd[i]) <= D[i] * st / std::pow((double)r, i) + 1e-12);
        }
    }
}

TEST_CASE("y_derivs matches the closed-form table and scaling bands") {
    u128 t = 100000000ull;
    double x = 3777.0;
    auto yd = y_derivs(t, x, 7);
    long double tv = (long double)(u64)t, xl = x;
    long double y = sqrtl(tv - xl * xl);
    long double want[8] = {
        y,
        -xl / y,
        -tv / powl(y, 3.0L),
        -3.0L * tv * xl / powl(y, 5.0L),
        (-3.0L * tv * tv - 12.0L * tv * xl * xl) / powl(y, 7.0L),
        -15.0L * tv * xl * (3.0L * tv + 4.0L * xl * xl) / powl(y, 9.0L),
        (-45.0L * tv * tv * tv - 540.0L * tv * tv * xl * xl - 360.0L * tv * powl(xl, 4.0L)) /
            powl(y, 11.0L),
        (-1575.0L * tv * tv * tv * xl - 6300.0L * tv * tv * powl(xl, 3.0L) -
         2520.0L * tv * powl(xl, 5.0L)) /
            powl(y, 13.0L),
    };
    for (int i = 0; i <= 7; ++i)
        CHECK(std::fabs((double)((yd[i] - want[i]) / want[i])) < 1e-12);

    // scaling: for 0.1 <= x/sqrt(t) <= 1/1.2, |y^(i)| * t^{(i-1)/2} stays in a
    // fixed positive band for i = 2, 3, 4 (frozen from the closed-form extrema).
    double st = std::sqrt((double)(u64)t);
    for (double frac = 0.1; frac <= 1.0 / 1.2; frac += 0.05) {
        auto yv = y_derivs(t, frac * st, 4);
        for (int i = 2; i <= 4; ++i) {
            double scaled = std::fabs((double)yv[i]) * std::pow((double)(u64)t, (i - 1) / 2.0);
            CHECK(scaled > 0.2);
            CHECK(scaled < 800.0);
        }
    }
}

// ---------------------------------------------------------------------------
// G ladder

TEST_CASE("G ladder envelopes: G-G1 and the main-term agreement of G1, G2") {
    for (auto [r, t] : std::vector<std::pair<i64, u128>>{{30, 100000000ull},
                                                         {100, (u128)10000000000ull}}) {
        double st = std::sqrt((double)(u64)t);
        double r4 = std::pow((double)r, 4.0);
        for (i64 nu = 1; nu < r; ++nu) {
            GTriple g = g_funcs(r, t, (double)nu, 8);
            double H = h_main(r, t, (double)nu);
            // frozen calibration: observed maxima 2.54, 0.018, 0.012
            CHECK(std::fabs(g.g - g.g1) * (double)r * (double)nu <= 4.0);
            CHECK(std::fabs(g.g1 + 2.0 * H) * r4 / st <= 0.1);
            CHECK(std::fabs(g.g2 - H) * r4 / st <= 0.1);
        }
    }
}

TEST_CASE("G and G1 are NaN at non-integer nu; G2 accepts real nu") {
    GTriple g = g_funcs(40, (u128)1000000ull, 7.5, 8);
    CHECK(std::isnan(g.g));
    CHECK(std::isnan(g.g1));
    CHECK(std::isfinite(g.g2));
}

TEST_CASE("G2 truncation-order stability") {
    i64 r = 100;
    u128 t = 100000000ull;
    double st = std::sqrt(1e8);
    for (i64 nu = 3; nu < r; nu += 7) {
        for (int N : {4, 6, 8, 10}) {
            double gN = g_funcs(r, t, (double)nu, N).g2;
            double gN1 = g_funcs(r, t, (double)nu, N + 1).g2;
            double gN2 = g_funcs(r, t, (double)nu, N + 2).g2;
            // only odd derivative orders contribute, so the N -> N+1 step at
            // even N adds nothing at all; the substantive shrink is N -> N+2.
            CHECK(gN == gN1);
            CHECK(std::fabs(gN - gN2) * std::pow((double)r, N) / st <= 0.05);
        }
    }
}

TEST_CASE("g_funcs rejects out-of-domain nu and N") {
    CHECK_THROWS_AS(g_funcs(10, (u128)10000ull, 0.0, 8), std::out_of_range);
    CHECK_THROWS_AS(g_funcs(10, (u128)10000ull, 10.0, 8), std::out_of_range);
    CHECK_THROWS_AS(g_funcs(10, (u128)10000ull, 5.0, 3), std::out_of_range);
    CHECK_THROWS_AS(g_funcs(10, (u128)10000ull, 5.0, 13), std::out_of_range);
}

// ---------------------------------------------------------------------------
// Taylor double-step

TEST_CASE("taylor_step residual envelope and order scaling") {
    i64 r = 50;
    u64 t = 100000000ull;
    double st = std::sqrt((double)t);
    double mx4 = 0, mx6 = 0;
    for (int N : {4, 6, 8}) {
        double mx = 0;
        for (i64 nu = 2; nu < r; ++nu)
            mx = std::max(mx, taylor_step_check(r, (u128)t, nu, N) * std::pow((double)r, N) / st);
        // frozen calibration: observed maxima 0.0087 / 0.0122 / 0.0184
        CHECK(mx <= 0.1);
        if (N == 4) mx4 = mx;
        if (N == 6) mx6 = mx;
    }
    // successive order gain: residual(4)/residual(6) tracks r^2
    double ratio = (mx4 / std::pow((double)r, 4)) / (mx6 / std::pow((double)r, 6));
    CHECK(ratio > (double)r * r / 8.0);
    CHECK(ratio < (double)r * r * 8.0);
}

TEST_CASE("taylor_step decomposition is exact and its rational part has denominator r(nu^2-1)") {
    i64 r = 50;
    u64 t = 100000000ull;
    for (i64 nu : {2, 7, 20, 44}) {
        TaylorStep ts = taylor_step(r, (u128)t, nu, 8);
        CHECK(ts.lhs == doctest::Approx(ts.rational + ts.g + ts.residual).epsilon(1e-12));
        CHECK(std::fabs(ts.residual) == doctest::Approx(taylor_step_check(r, (u128)t, nu, 8)));
        // r*(nu^2-1)*rational is an integer
        double scaled = ts.rational * (double)r * (double)(nu * nu - 1);
        CHECK(std::fabs(scaled - std::round(scaled)) < 1e-6);
    }
}

TEST_CASE("taylor_step rational part generally needs the nu^2-1 factor") {
    // (r, t, nu) = (5, 1000, 3): rational * r = -24.75 is not an integer,
    // rational * r * (nu^2 - 1) = -198 is.
    TaylorStep ts = taylor_step(5, (u128)1000ull, 3, 4);
    double times_r = ts.rational * 5.0;
    CHECK(times_r == doctest::Approx(-24.75).epsilon(1e-12));
    CHECK(std::fabs(times_r * 8.0 - (-198.0)) < 1e-9);
}

// ---------------------------------------------------------------------------
// F2 profile and the reconstructed chain

TEST_CASE("f2_profile seeds and recurrence") {
    i64 r = 40;
    u64 t = 1000000ull;
    auto f2 = f2_profile(r, (u128)t, 8);
    CHECK(f2[0] == std::sqrt((double)t)); // n_0 = sqrt(t), exact at square t
    CHECK(f2[1] == node(r, (u128)t, 1).n);
    CHECK(f2[3] - f2[1] == doctest::Approx(g_funcs(r, (u128)t, 2.0, 8).g2).epsilon(1e-12));
    for (i64 nu = 1; nu < r; ++nu) {
        double defect = f2[nu + 1] - f2[nu - 1] - g_funcs(r, (u128)t, (double)nu, 8).g2;
        CHECK(std::fabs(defect) < 1e-9);
    }
}

TEST_CASE("chain with exact rationals tracks e(r n_nu); bare F2 phases decohere") {
    i64 r = 50;
    u64 t = 1000000ull;
    for (int N : {6, 8}) {
        auto f2 = f2_profile(r, (u128)t, N);
        long double seed_e = n_phase(r, (u128)t, 0).value;
        long double seed_o = n_phase(r, (u128)t, 1).value;
        long double acc_e = 0, acc_o = 0;
        double mx_track = 0, mx_bare = 0;
        for (i64 nu = 2; nu <= r; ++nu) {
            TaylorStep ts = taylor_step(r, (u128)t, nu - 1, N);
            long double& acc = (nu % 2 == 0) ? acc_e : acc_o;
            acc += (long double)r * ((long double)ts.rational + (long double)ts.g);
            long double th = (nu % 2 == 0 ? seed_e : seed_o) + acc;
            th -= floorl(th);
            double np = n_phase(r, (u128)t, nu).value;
            double env = (double)nu * std::sqrt((double)t) / std::pow((double)r, N - 1);
            mx_track = std::max(mx_track, circ_gap((double)th, np) / env);
            long double bare = (long double)r * (long double)f2[nu];
            bare -= floorl(bare);
            mx_bare = std::max(mx_bare, circ_gap((double)bare, np));
        }
        // The order-N truncation envelope holds along the chain that keeps the
        // exact rational parts (frozen constant: observed 0.055).
        CHECK(mx_track <= 0.5);
        // The rational parts have denominator r(nu^2-1), not r, so the phases
        // of r*F2 alone drift off e(r n_nu) by O(1): decoherence is expected
        // and the reformulated sum relies on the envelope, not phase lock.
        CHECK(mx_bare > 1.0);
    }
}

// ---------------------------------------------------------------------------
// omega coefficients

TEST_CASE("omega seeds vanish and parity-chain steps are O(1/nu)") {
    i64 r = 100;
    u64 t = 100000000ull;
    auto w = omega_coeffs(r, (u128)t, 8);
    CHECK(w[0].value == 0.0);
    CHECK(w[1].value == 0.0);
    for (i64 nu = 2; nu <= r; ++nu) {
        double d = std::fabs(w[nu].value - w[nu - 2].value);
        d -= std::floor(d);
        if (d > 0.5) d = 1.0 - d;
        // one chain step is r*(G-G1)(nu-1) ~ lambda_{nu} + lambda_{nu-2} <= 2/(nu-1);
        // frozen margin over the observed maximum 1.98
        CHECK(d * (double)(nu - 1) <= 3.0);
    }
}

TEST_CASE("total variation of e(omega) is O(ln r) along parity chains") {
    for (i64 r : {10, 50, 100, 500}) {
        auto w = omega_coeffs(r, (u128)100000000ull, 8);
        CHECK(total_variation(w) / std::log((double)r) <= 9.0); // observed max 6.38
    }
    for (i64 r : {16, 64}) { // t = r^8 scale points
        u128 t = 1;
        for (int i = 0; i < 8; ++i) t *= (u128)r;
        auto w = omega_coeffs(r, t, 8);
        CHECK(total_variation(w) / std::log((double)r) <= 9.0);
    }
}

TEST_CASE("adjacent-index variation mixes the two chains and grows linearly") {
    i64 r = 100;
    auto w = omega_coeffs(r, (u128)100000000ull, 8);
    double adj = 0;
    for (i64 nu = 2; nu <= r; ++nu)
        adj += std::abs(unit_exp(w[nu].value) - unit_exp(w[nu - 1].value));
    // the two parity chains are seeded independently, so e(w) jumps O(1)
    // between adjacent indices: observed adj/r = 1.37 vs parity TV/ln r = 5.8
    CHECK(adj >= 0.5 * (double)r);
    CHECK(adj >= 2.0 * total_variation(w));
}

// ---------------------------------------------------------------------------
// stationary-phase and n-form sums

TEST_CASE("stationary phase values are exact square-root fractional parts") {
    // frac(r*y_nu + nu*x_nu) = frac(sqrt(t*(r^2+nu^2)))
    i64 r = 30;
    u64 t = 1000000ull;
    for (i64 nu : {0, 1, 7, 30}) {
        Node nd = node(r, (u128)t, nu);
        long double direct = (long double)r * (long double)nd.y +
                             (long double)nu * (long double)nd.x;
        direct -= floorl(direct);
        CHECK(circ_gap(stationary_phase(r, (u128)t, nu).value, (double)direct) < 1e-8);
        // phase identity: nu*m_nu is an integer, so nu*x and nu*lambda agree mod 1
        long double via_lambda = (long double)r * (long double)nd.y +
                                 (long double)nu * (long double)nd.lambda;
        via_lambda -= floorl(via_lambda);
        CHECK(circ_gap((double)via_lambda, (double)direct) < 1e-8);
    }
}

TEST_CASE("stationary_phase_sum envelope against direct_sum") {
    double worst = 0;
    for (auto [r, t] : std::vector<std::pair<i64, u64>>{{6, 1000000ull},
                                                        {10, 1000000ull},
                                                        {32, 1000000ull},
                                                        {10, 100000000ull},
                                                        {22, 100000000ull},
                                                        {100, 100000000ull}}) {
        double env = std::pow((double)t, 0.25) / std::pow((double)r, 1.5) + 1.0;
        double gap = std::abs(direct_sum(r, t) - stationary_phase_sum(r, t));
        worst = std::max(worst, gap / env);
    }
    CHECK(worst <= 2.0); // frozen: observed max 0.38
}

TEST_CASE("sign calibration: e(-1/8) beats e(+1/8) against the direct sum") {
    for (auto [r, t] : std::vector<std::pair<i64, u64>>{
             {6, 1000000ull}, {10, 1000000ull}, {22, 100000000ull}, {100, 100000000ull}}) {
        ComplexValue d = direct_sum(r, t);
        CHECK(std::abs(d - stationary_phase_sum(r, t, -1)) <
              std::abs(d - stationary_phase_sum(r, t, +1)));
    }
}

TEST_CASE("n_form phases: nu=0 term identical, per-nu gap within the r/(nu^2 sqrt t) envelope") {
    CHECK(n_phase(50, (u128)100000000ull, 0).value ==
          stationary_phase(50, (u128)100000000ull, 0).value);
    for (auto [r, t] : std::vector<std::pair<i64, u64>>{{50, 100000000ull}, {30, 1000000ull}}) {
        for (i64 nu = 1; nu <= r; ++nu) {
            double gap = circ_gap(stationary_phase(r, (u128)t, nu).value,
                                  n_phase(r, (u128)t, nu).value);
            double env = (double)r / ((double)nu * (double)nu * std::sqrt((double)t));
            CHECK(gap <= 10.0 * env); // frozen: observed constant 6.68
        }
    }
}

TEST_CASE("n_form_sum stays near stationary_phase_sum within the summed envelope") {
    // per-term gap <= 2 pi * 6.68 * r/(nu^2 sqrt t) with amplitude <= t^{1/4}/r^{3/2}
    // sums to below 70 * t^{-1/4} / sqrt(r).
    for (auto [r, t] : std::vector<std::pair<i64, u64>>{{50, 100000000ull}, {30, 1000000ull}}) {
        double bound = 70.0 * std::pow((double)t, -0.25) / std::sqrt((double)r);
        CHECK(std::abs(n_form_sum(r, t) - stationary_phase_sum(r, t)) <= bound);
    }
}

// ---------------------------------------------------------------------------
// reformulated sum

TEST_CASE("reformulated_sum envelope with N = 8") {
    double worst = 0;
    for (auto [r, t] : std::vector<std::pair<i64, u64>>{{10, 1000000ull},
                                                        {32, 1000000ull},
                                                        {22, 100000000ull},
                                                        {100, 100000000ull},
                                                        {499, 1000000ull}}) {
        double env = std::pow((double)t, 0.25) / std::pow((double)r, 1.5) + 1.0 +
                     std::pow((double)t, 0.75) / std::pow((double)r, 8.0 - 1.5);
        double gap = std::abs(direct_sum(r, t) - reformulated_sum(r, t, 8));
        CHECK(std::isfinite(gap));
        worst = std::max(worst, gap / env);
    }
    CHECK(worst <= 8.0); // frozen: observed max 2.27
}

TEST_CASE("reformulated_sum N-dependence fades at rate ~ r per order") {
    i64 r = 20;
    u64 t = 100000000ull;
    double d4 = std::abs(reformulated_sum(r, t, 4) - reformulated_sum(r, t, 6));
    double d6 = std::abs(reformulated_sum(r, t, 6) - reformulated_sum(r, t, 8));
    double d8 = std::abs(reformulated_sum(r, t, 8) - reformulated_sum(r, t, 10));
    // two-order shrink factors track r^2 = 400 (observed 978 and 374)
    CHECK(d4 / d6 > 50.0);
    CHECK(d6 / d8 > 50.0);
    // the N-independent remainder against the n-form is the rational-part
    // decoherence floor, O(1)-sized, and does not shrink with N
    double floor_gap = std::abs(reformulated_sum(r, t, 10) - n_form_sum(r, t));
    CHECK(floor_gap > 0.5);
    CHECK(floor_gap < 50.0);
}

// ---------------------------------------------------------------------------
// oscillatory integrals and the Poisson right-hand side

TEST_CASE("oscillatory_integral matches the stationary-phase main term at interior nu") {
    i64 r = 20;
    u64 t = 1000000ull;
    double mx_main = 0, mx_mag = 0;
    for (i64 nu = 0; nu <= r; ++nu) {
        OscIntegral o = oscillatory_integral(r, t, nu);
        CHECK(o.converged);
        CHECK(o.err_estimate <= 1e-6);
        long double B = (long double)r * r + (long double)nu * nu;
        double amp = (double)((long double)r * powl((long double)t, 0.25L) * powl(B, -0.75L));
        ComplexValue main = amp * unit_exp(stationary_phase(r, (u128)t, nu).value - 0.125);
        if (nu >= 1 && nu < r) mx_main = std::max(mx_main, std::abs(o.value - main));
        mx_mag = std::max(mx_mag, std::abs(o.value) * std::sqrt((double)r) /
                                      std::pow((double)t, 0.25));
    }
    CHECK(mx_main <= 0.5); // frozen: observed 0.16
    CHECK(mx_mag <= 2.0);  // van der Corput shape |I| <= C t^{1/4}/sqrt(r); observed 0.99
}

TEST_CASE("oscillatory_integral nu=0 magnitude bound") {
    OscIntegral o = oscillatory_integral(10, 1000000ull, 0);
    CHECK(o.converged);
    CHECK(std::abs(o.value) <= 2.0 * std::pow(1e6, 0.25) / std::sqrt(10.0)); // observed C = 0.50
}

TEST_CASE("poisson_rhs equals its two integrals at r = 1 and stays near direct_sum") {
    u64 t = 10000ull;
    OscIntegral p = poisson_rhs(1, t);
    ComplexValue parts = oscillatory_integral(1, t, 0).value + oscillatory_integral(1, t, 1).value;
    CHECK(std::abs(p.value - parts) < 1e-12);
    CHECK(std::abs(p.value - direct_sum(1, t)) <= 1.0); // observed 0.27

    for (i64 r : {2, 5, 12}) {
        for (u64 tt : {10000ull, 1000000ull}) {
            OscIntegral q = poisson_rhs(r, tt);
            CHECK(q.converged);
            CHECK(std::abs(q.value - direct_sum(r, tt)) <= 1.0); // observed max 0.48
        }
    }
}

TEST_CASE("poisson residual does not grow with t at fixed r") {
    std::vector<double> xs, ys;
    for (u64 t : {10000ull, 1000000ull, 100000000ull}) {
        double gap = std::abs(poisson_rhs(5, t).value - direct_sum(5, t));
        xs.push_back(std::log((double)t));
        ys.push_back(std::log(gap));
    }
    CHECK(fit_slope(xs, ys) <= 0.02); // observed -0.06
}

TEST_CASE("oscillatory_integral rejects out-of-domain arguments") {
    CHECK_THROWS_AS(oscillatory_integral(10, 1000000ull, -1), std::out_of_range);
    CHECK_THROWS_AS(oscillatory_integral(10, 1000000ull, 11), std::out_of_range);
    CHECK_THROWS_AS(oscillatory_integral(1000, 1000000ull, 5), std::out_of_range);
}

// ---------------------------------------------------------------------------
// chain residuals

TEST_CASE("chain_residuals collects finite values and symmetric gaps") {
    ChainResiduals cr = chain_residuals(6, 10000ull, 8, true);
    CHECK(std::isfinite(std::abs(cr.direct)));
    CHECK(std::isfinite(std::abs(cr.poisson)));
    CHECK(std::isfinite(std::abs(cr.stationary)));
    CHECK(std::isfinite(std::abs(cr.n_form)));
    CHECK(std::isfinite(std::abs(cr.reformulated)));
    CHECK(cr.gaps.size() == 10); // all pairs over five representations
    for (const auto& [key, v] : cr.gaps) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }
    CHECK(cr.gap("direct", "stationary") == cr.gap("stationary", "direct"));
    CHECK(cr.gap("direct", "stationary") ==
          doctest::Approx(std::abs(cr.direct - cr.stationary)).epsilon(1e-15));
    CHECK_THROWS_AS(cr.gap("direct", "unknown"), std::out_of_range);

    ChainResiduals lean = chain_residuals(6, 10000ull, 8, false);
    CHECK(std::isnan(std::abs(lean.poisson)));
    CHECK(lean.gaps.size() == 6); // pairs over the four cheap representations
}

TEST_CASE("gap growth exponents at r = t^{1/8} match each gap's prediction") {
    // The coherent gaps follow the envelope t^{1/4} r^{-3/2} + 1, growth
    // exponent 1/16 at r = t^{1/8}.  The reformulated gap is a phase-random
    // walk (its rational parts are dropped), so its magnitude grows like
    // sqrt(r) * t^{1/4}/r^{3/2} = t^{1/8} instead.  Fitted slopes must stay
    // within 0.05 / 0.07 of those predictions.
    std::vector<double> lt, gs, gn, gref;
    for (double te : {6.0, 6.667, 7.333, 8.0, 8.667, 9.333, 10.0}) {
        u64 t = (u64)llround(std::pow(10.0, te));
        i64 rc = (i64)llround(std::pow((double)t, 0.125));
        double as = 0, an = 0, aref = 0;
        for (i64 r = rc - 1; r <= rc + 1; ++r) { // average 3 nearby r to tame noise
            ChainResiduals cr = chain_residuals(r, t, 8, false);
            as += cr.gap("direct", "stationary") / 3.0;
            an += cr.gap("direct", "n_form") / 3.0;
            aref += cr.gap("direct", "reformulated") / 3.0;
        }
        lt.push_back(std::log((double)t));
        gs.push_back(std::log(as));
        gn.push_back(std::log(an));
        gref.push_back(std::log(aref));
    }
    CHECK(std::fabs(fit_slope(lt, gs) - 1.0 / 16.0) <= 0.05);  // observed 0.092
    CHECK(std::fabs(fit_slope(lt, gn) - 1.0 / 16.0) <= 0.05);  // observed 0.091
    CHECK(std::fabs(fit_slope(lt, gref) - 1.0 / 8.0) <= 0.07); // observed 0.167
}
