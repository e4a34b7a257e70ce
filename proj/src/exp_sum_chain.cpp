#include "circlelab/exp_sum_chain.hpp"

#include "circlelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace circlelab {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

int bitlen(u128 v) {
    int n = 0;
    while (v) {
        v >>= 1;
        ++n;
    }
    return n;
}

void require(bool ok, const char* what) {
    if (!ok) throw std::out_of_range(what);
}

// ---------------------------------------------------------------------------
// exact node arithmetic
//
// p = floor(nu * x_nu) = isqrt(floor(t nu^4 / B)), since nu * x_nu = sqrt(t nu^4 / B)
// and isqrt(floor(z)) = floor(sqrt(z)).  lambda_nu = x_nu - p/nu has the exact
// numerator t nu^4 - p^2 B >= 0:
//   nu*lambda = nu x - p = (t nu^4 / B - p^2) / (nu x + p),
// so lambda = (t nu^4 - p^2 B) / (B nu (nu x + p)) with only the denominator floating.

struct ExactNode {
    i64 nu = 0;
    u128 B = 0;
    u64 p = 0;           // floor(nu * x_nu); 0 at nu = 0
    u64 S = 0;           // integer part of sqrt(t nu^2 - p^2) = nu * n_nu
    double F = 0;        // fractional part of the same root
    long double x = 0;   // p/nu + lambda
    long double y = 0;
    long double lambda = 0;
    long double n = 0;   // (S + F)/nu
};

void check_node_domain(i64 r, u128 t, i64 nu, const char* what) {
    require(r >= 1, "node: r must be >= 1");
    require(t >= 1, "node: t must be >= 1");
    require(nu >= 0 && (u128)nu <= (u128)r, "node: nu must lie in [0, r]");
    require((u128)r * (u128)r <= t, "node: r must be at most sqrt(t)");
    if (nu > 0)
        require(bitlen(t) + 4 * bitlen((u128)nu) <= 126, what);
}

ExactNode exact_node(i64 r, u128 t, i64 nu) {
    check_node_domain(r, t, nu, "node: t * nu^4 exceeds the 128-bit guard");
    ExactNode en;
    en.nu = nu;
    en.B = (u128)r * (u128)r + (u128)nu * (u128)nu;
    const long double tl = (long double)t;
    const long double st = sqrtl(tl);
    const long double sB = sqrtl((long double)en.B);
    if (nu == 0) {
        ExactSqrt root = frac_sqrt(t);
        en.S = (u64)root.s;
        en.F = root.f;
        en.x = 0;
        en.lambda = 0;
        en.y = st;
        en.n = (long double)en.S + (long double)en.F;
        return en;
    }
    const u128 nu2 = (u128)nu * (u128)nu;
    const u128 q = t * nu2 * nu2 / en.B;
    en.p = (u64)isqrt(q);
    // lambda from the exact numerator; the denominator needs only ~1e-18 rel.
    const u128 numer = t * nu2 * nu2 - (u128)en.p * en.p * en.B;
    const long double x_approx = (long double)nu * st / sB;
    const long double denom =
        (long double)en.B * (long double)nu * ((long double)nu * x_approx + (long double)en.p);
    en.lambda = (long double)numer / denom;
    en.x = (long double)en.p / (long double)nu + en.lambda;
    en.y = (long double)r * st / sB;
    const u128 rad = t * nu2 - (u128)en.p * en.p;
    ExactSqrt root = frac_sqrt(rad);
    en.S = (u64)root.s;
    en.F = root.f;
    en.n = ((long double)en.S + (long double)en.F) / (long double)nu;
    return en;
}

// Exact-rationalized spacing x_{w+1} - x_w; strictly positive.
long double spacing(i64 r, u128 t, i64 w) {
    const u128 Bw = (u128)r * r + (u128)w * w;
    const u128 Bw1 = (u128)r * r + (u128)(w + 1) * (w + 1);
    const long double sBw = sqrtl((long double)Bw);
    const long double sBw1 = sqrtl((long double)Bw1);
    const long double numer = sqrtl((long double)t) * (long double)(2 * w + 1) * (long double)r * (long double)r;
    const long double denom = sBw * sBw1 * ((long double)(w + 1) * sBw + (long double)w * sBw1);
    return numer / denom;
}

long double factorial(int k) {
    long double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// sum_{j=0}^{i-1} a^j b^{i-1-j}, the cofactor in a^i - b^i = (a-b) * S.
long double power_cofactor(long double a, long double b, int i) {
    long double s = 0;
    long double aj = 1;
    for (int j = 0; j < i; ++j) {
        long double bk = powl(b, i - 1 - j);
        s += aj * bk;
        aj *= a;
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// derivative ladders

std::vector<long double> y_derivs(u128 t, double x, int imax) {
    require(imax >= 0, "y_derivs: imax must be >= 0");
    const long double tl = (long double)t;
    const long double xl = (long double)x;
    require(xl * xl < tl, "y_derivs: |x| must be < sqrt(t)");
    std::vector<long double> yd(imax + 1);
    yd[0] = sqrtl(tl - xl * xl);
    if (imax >= 1) yd[1] = -xl / yd[0];
    std::vector<long double> binom(std::max(imax + 1, 2), 0.0L);
    for (int i = 2; i <= imax; ++i) {
        // Pascal row for C(i-1, j).
        binom[0] = 1;
        for (int j = i - 1; j >= 1; --j) binom[j] = (j <= i - 2 ? binom[j] : 0.0L) + binom[j - 1];
        long double s = (i == 2) ? 1.0L : 0.0L; // d^{i-1}/dx^{i-1} of x is x, 1, then 0
        for (int j = 1; j <= i - 1; ++j) s += binom[j] * yd[j] * yd[i - j];
        yd[i] = -s / yd[0];
    }
    return yd;
}

std::vector<long double> x_derivs(i64 r, u128 t, double nu, int kmax) {
    require(r >= 1, "x_derivs: r must be >= 1");
    require(kmax >= 1, "x_derivs: kmax must be >= 1");
    const long double r2 = (long double)r * (long double)r;
    const long double nul = (long double)nu;
    const long double B = r2 + nul * nul;
    // P_1 = r^2; P_{k+1} = P_k' * B - (2k+1) nu P_k; x^{(k)} = sqrt(t) P_k(nu) / B^{(2k+1)/2}.
    std::vector<long double> P{r2};
    std::vector<long double> out(kmax + 1, 0.0L);
    const long double st = sqrtl((long double)t);
    const long double sB = sqrtl(B);
    long double Bk = sB; // B^{(2k+1)/2} for k = 0 is sqrt(B); advance by B per k
    for (int k = 1; k <= kmax; ++k) {
        Bk *= B;
        long double val = 0;
        for (int d = (int)P.size() - 1; d >= 0; --d) val = val * nul + P[d];
        out[k] = st * val / Bk;
        if (k == kmax) break;
        // P' * B: B = r^2 + nu^2 multiplies each derivative coefficient.
        std::vector<long double> Q(P.size() + 1, 0.0L);
        for (int d = 1; d < (int)P.size(); ++d) {
            Q[d - 1] += d * P[d] * r2;
            Q[d + 1] += d * P[d];
        }
        // -(2k+1) nu P shifts degree up by one.
        for (int d = 0; d < (int)P.size(); ++d) Q[d + 1] -= (long double)(2 * k + 1) * P[d];
        P = std::move(Q);
    }
    return out;
}

double chain_x(i64 r, u128 t, double nu) {
    const long double r2 = (long double)r * (long double)r;
    const long double B = r2 + (long double)nu * (long double)nu;
    return (double)((long double)nu * sqrtl((long double)t) / sqrtl(B));
}

// ---------------------------------------------------------------------------
// nodes and exact phases

Node node(i64 r, u128 t, i64 nu) {
    const ExactNode en = exact_node(r, t, nu);
    Node out;
    out.nu = nu;
    out.x = (double)en.x;
    out.y = (double)en.y;
    out.m_num = (i64)en.p;
    out.m = nu == 0 ? 0.0 : (double)((long double)en.p / (long double)nu);
    out.lambda = (double)en.lambda;
    out.n = (double)en.n;
    return out;
}

Phase stationary_phase(i64 r, u128 t, i64 nu) {
    check_node_domain(r, t, nu, "stationary_phase: t * nu^4 exceeds the 128-bit guard");
    // r y + nu x = sqrt(t (r^2 + nu^2)) identically.
    const u128 B = (u128)r * r + (u128)nu * nu;
    require(bitlen(t) + bitlen(B) <= 126, "stationary_phase: t * B exceeds the 128-bit guard");
    ExactSqrt root = frac_sqrt(t * B);
    return Phase{root.f};
}

Phase n_phase(i64 r, u128 t, i64 nu) {
    const ExactNode en = exact_node(r, t, nu);
    if (nu == 0) {
        // r n_0 = sqrt(t r^2): same path as stationary_phase(nu = 0).
        return stationary_phase(r, t, 0);
    }
    // r n = (r S + r F)/nu; the integer part of r S / nu drops out exactly.
    const u128 rs = (u128)r * (u128)en.S;
    const u64 rem = (u64)(rs % (u128)nu);
    const long double frac =
        ((long double)rem + (long double)r * (long double)en.F) / (long double)nu;
    return Phase{frac_part((double)(frac - floorl(frac)))};
}

// ---------------------------------------------------------------------------
// direct sum

ComplexValue direct_sum(i64 r, u64 t) {
    require(r >= 1, "direct_sum: r must be >= 1");
    require(t >= 1 && t <= 1000000000000ull, "direct_sum: t must lie in [1, 1e12]");
    require((u128)r * (u128)r <= (u128)t, "direct_sum: r must be at most sqrt(t)");
    const u64 X = isqrt(t >> 1); // floor(sqrt(t/2))
    NeumaierSum re, im;
    for (u64 m = 0; m <= X; ++m) {
        ComplexValue c = unit_exp(phase_of((u64)r, frac_sqrt(t - m * m)).value);
        re.add(c.real());
        im.add(c.imag());
    }
    return ComplexValue{re.value() / (double)r, im.value() / (double)r};
}

// ---------------------------------------------------------------------------
// oscillatory integrals: panel walk with wavelength-capped steps

namespace {

struct PhaseFn {
    long double r, t, nu;
    // phase in revolutions and its first two derivatives
    long double phi(long double x) const { return r * sqrtl(t - x * x) + nu * x; }
    long double dphi(long double x) const { return nu - r * x / sqrtl(t - x * x); }
    long double d2phi(long double x) const {
        const long double y = sqrtl(t - x * x);
        return -r * t / (y * y * y);
    }
};

} // namespace

OscIntegral oscillatory_integral(i64 r, u64 t, i64 nu, double abs_tol) {
    require(r >= 1, "oscillatory_integral: r must be >= 1");
    require(nu >= 0 && nu <= r, "oscillatory_integral: nu must lie in [0, r]");
    require(4 * (u128)r * (u128)r <= (u128)t, "oscillatory_integral: 2r must be at most sqrt(t)");
    const double X = (double)isqrt(t >> 1);
    const PhaseFn ph{(long double)r, (long double)t, (long double)nu};
    auto f = [&ph](double x) -> ComplexValue {
        const long double p = ph.phi((long double)x);
        return unit_exp((double)(p - floorl(p)));
    };

    OscIntegral out;
    // Split at the stationary point when it is interior.
    std::vector<double> cuts{0.0};
    const double xs = chain_x(r, t, (double)nu);
    if (xs > 0.0 && xs < X) cuts.push_back(xs);
    cuts.push_back(X);

    NeumaierSum re, im;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        double a = cuts[s];
        const double b = cuts[s + 1];
        while (a < b) {
            const long double d1 = fabsl(ph.dphi((long double)a));
            const long double d2 = fabsl(ph.d2phi((long double)a));
            double h = (double)std::min(0.35L / (d1 + 1e-12L), 0.35L / sqrtl(d2 + 1e-30L));
            h = std::min(h, b - a);
            const double tol = abs_tol * 0.5 * (h / (X + 1.0));
            auto p = quad::adaptive_gk15(f, a, a + h, tol, 20);
            re.add(p.value.real());
            im.add(p.value.imag());
            out.err_estimate += p.err_estimate;
            out.evals += p.evals;
            a += h;
        }
    }
    out.value = ComplexValue{re.value(), im.value()};
    out.converged = out.err_estimate <= abs_tol;
    return out;
}

OscIntegral poisson_rhs(i64 r, u64 t, double abs_tol) {
    OscIntegral out;
    NeumaierSum re, im;
    for (i64 nu = 0; nu <= r; ++nu) {
        OscIntegral one = oscillatory_integral(r, t, nu, abs_tol);
        re.add(one.value.real() / (double)r);
        im.add(one.value.imag() / (double)r);
        out.err_estimate += one.err_estimate / (double)r;
        out.evals += one.evals;
        out.converged = out.converged && one.converged;
    }
    out.value = ComplexValue{re.value(), im.value()};
    return out;
}

// ---------------------------------------------------------------------------
// stationary-phase and n-form sums

namespace {

// t^{1/4} (r^2 + nu^2)^{-3/4}
double envelope_factor(u64 t, i64 r, i64 nu) {
    const long double B = (long double)r * r + (long double)nu * nu;
    return (double)(powl((long double)t, 0.25L) * powl(B, -0.75L));
}

ComplexValue phase_weighted_sum(i64 r, u64 t, int eighth_sign,
                                const std::vector<double>& fracs) {
    require(eighth_sign == 1 || eighth_sign == -1, "phase sum: eighth_sign must be +-1");
    const double shift = eighth_sign / 8.0;
    NeumaierSum re, im;
    for (i64 nu = 0; nu <= r; ++nu) {
        const double amp = envelope_factor(t, r, nu);
        ComplexValue c = unit_exp(fracs[(std::size_t)nu] + shift);
        re.add(amp * c.real());
        im.add(amp * c.imag());
    }
    return ComplexValue{re.value(), im.value()};
}

} // namespace

ComplexValue stationary_phase_sum(i64 r, u64 t, int eighth_sign) {
    require(4 * (u128)r * (u128)r <= (u128)t, "stationary_phase_sum: 2r must be at most sqrt(t)");
    std::vector<double> fr((std::size_t)r + 1);
    for (i64 nu = 0; nu <= r; ++nu) fr[(std::size_t)nu] = stationary_phase(r, t, nu).value;
    return phase_weighted_sum(r, t, eighth_sign, fr);
}

ComplexValue n_form_sum(i64 r, u64 t) {
    require((u128)r * (u128)r <= (u128)t, "n_form_sum: r must be at most sqrt(t)");
    std::vector<double> fr((std::size_t)r + 1);
    for (i64 nu = 0; nu <= r; ++nu) fr[(std::size_t)nu] = n_phase(r, t, nu).value;
    return phase_weighted_sum(r, t, -1, fr);
}

// ---------------------------------------------------------------------------
// G, G1, G2

namespace {

void check_g_domain(i64 r, double nu, int N, const char* what) {
    if (N < 4 || N > 12) throw std::out_of_range(std::string(what) + ": N must lie in [4, 12]");
    if (!(nu >= 1.0 && nu <= (double)(r - 1)))
        throw std::out_of_range(std::string(what) + ": nu must lie in [1, r-1]");
}

// G2 at real nu: odd outer orders, odd inner nu-derivative orders.  The even
// inner orders cancel between the +1 and -1 step expansions, and keeping them
// would push the residual constants past the sqrt(t)/r^{l+4} envelope.
long double g2_value(i64 r, u128 t, double nu, int N) {
    const long double xv = (long double)chain_x(r, t, nu);
    const std::vector<long double> yd = y_derivs(t, (double)xv, N - 1);
    const std::vector<long double> xd = x_derivs(r, t, nu, std::max(1, N - 3));
    long double g2 = 0;
    for (int i = 3; i <= N - 1; i += 2) {
        long double a = 0;
        for (int k = 1; k <= N - i; k += 2) a += xd[k] / factorial(k);
        g2 += 2.0L * yd[i] / factorial(i) * powl(a, i);
    }
    return g2;
}

struct GExact {
    long double g = 0, g1 = 0, diff = 0; // diff = g - g1, factored
};

GExact g_exact(i64 r, u128 t, i64 nu, int N) {
    const ExactNode lo = exact_node(r, t, nu - 1);
    const ExactNode at = exact_node(r, t, nu);
    const ExactNode hi = exact_node(r, t, nu + 1);
    const long double dxp = spacing(r, t, nu);        // x_{nu+1} - x_nu
    const long double dxm = -spacing(r, t, nu - 1);   // x_{nu-1} - x_nu
    const long double dmp = dxp - hi.lambda;          // m_{nu+1} - x_nu
    const long double dmm = dxm - lo.lambda;          // m_{nu-1} - x_nu
    const std::vector<long double> yd = y_derivs(t, (double)at.x, N - 1);
    GExact out;
    for (int i = 2; i <= N - 1; ++i) {
        const long double w = yd[i] / factorial(i);
        out.g += w * (powl(dmp, i) - powl(dmm, i));
        out.g1 += w * (powl(dxp, i) - powl(dxm, i));
        // (dmp^i - dxp^i) - (dmm^i - dxm^i) with dmp - dxp = -lambda_{nu+1} exact
        out.diff += w * (-hi.lambda * power_cofactor(dmp, dxp, i) +
                         lo.lambda * power_cofactor(dmm, dxm, i));
    }
    return out;
}

} // namespace

GTriple g_funcs(i64 r, u128 t, double nu, int N) {
    check_g_domain(r, nu, N, "g_funcs");
    GTriple out;
    out.g2 = (double)g2_value(r, t, nu, N);
    const double nr = std::round(nu);
    if (std::abs(nu - nr) <= 1e-9) {
        GExact ge = g_exact(r, t, (i64)nr, N);
        out.g = (double)ge.g;
        out.g1 = (double)ge.g1;
    } else {
        out.g = std::numeric_limits<double>::quiet_NaN();
        out.g1 = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

// ---------------------------------------------------------------------------
// F2, omega, reformulated sum

std::vector<double> f2_profile(i64 r, u128 t, int N) {
    if (N < 4 || N > 12) throw std::out_of_range("f2_profile: N must lie in [4, 12]");
    require(r >= 1, "f2_profile: r must be >= 1");
    std::vector<double> f2((std::size_t)r + 1);
    f2[0] = (double)exact_node(r, t, 0).n;
    f2[1] = (double)exact_node(r, t, 1).n;
    // Double-precision prefix recurrence: the stored identity
    // f2[nu+1] - f2[nu-1] = fl(G2(nu)) then holds to one rounding of the add.
    for (i64 nu = 2; nu <= r; ++nu)
        f2[(std::size_t)nu] =
            f2[(std::size_t)nu - 2] + (double)g2_value(r, t, (double)(nu - 1), N);
    return f2;
}

std::vector<Phase> omega_coeffs(i64 r, u128 t, int N) {
    if (N < 4 || N > 12) throw std::out_of_range("omega_coeffs: N must lie in [4, 12]");
    require(r >= 1, "omega_coeffs: r must be >= 1");
    std::vector<Phase> w((std::size_t)r + 1);
    w[0] = Phase{0};
    if (r >= 1) w[1] = Phase{0};
    // r * (F - F1)(nu) accumulates r * (G - G1) along each parity chain; the
    // factored differences keep each summand ~1/nu without cancellation.
    long double even_acc = 0, odd_acc = 0;
    for (i64 nu = 2; nu <= r; ++nu) {
        GExact ge = g_exact(r, t, nu - 1, N);
        long double& acc = (nu % 2 == 0) ? even_acc : odd_acc;
        acc += (long double)r * ge.diff;
        const long double fr = acc - floorl(acc);
        w[(std::size_t)nu] = Phase{frac_part((double)fr)};
    }
    return w;
}

double total_variation(const std::vector<Phase>& w) {
    double tv = 0;
    for (std::size_t i = 2; i < w.size(); ++i)
        tv += std::abs(unit_exp(w[i].value) - unit_exp(w[i - 2].value));
    return tv;
}

ComplexValue reformulated_sum(i64 r, u64 t, int N, int eighth_sign) {
    if (N < 4 || N > 12) throw std::out_of_range("reformulated_sum: N must lie in [4, 12]");
    require((u128)r * (u128)r <= (u128)t, "reformulated_sum: r must be at most sqrt(t)");
    // Long-double parity chains for r*F2 so the mod-1 phases do not inherit
    // the double rounding of the stored profile.
    std::vector<double> fr((std::size_t)r + 1);
    const double seed0 = n_phase(r, t, 0).value;
    const double seed1 = r >= 1 ? n_phase(r, t, 1).value : 0.0;
    fr[0] = seed0;
    if (r >= 1) fr[1] = seed1;
    long double even_acc = 0, odd_acc = 0;
    for (i64 nu = 2; nu <= r; ++nu) {
        long double& acc = (nu % 2 == 0) ? even_acc : odd_acc;
        acc += (long double)r * g2_value(r, t, (double)(nu - 1), N);
        const long double th = (long double)(nu % 2 == 0 ? seed0 : seed1) + acc;
        fr[(std::size_t)nu] = frac_part((double)(th - floorl(th)));
    }
    const std::vector<Phase> w = omega_coeffs(r, t, N);
    for (i64 nu = 0; nu <= r; ++nu)
        fr[(std::size_t)nu] = frac_part(fr[(std::size_t)nu] + w[(std::size_t)nu].value);
    return phase_weighted_sum(r, t, eighth_sign, fr);
}

// ---------------------------------------------------------------------------
// Taylor double-step bookkeeping

TaylorStep taylor_step(i64 r, u128 t, i64 nu, int N) {
    check_g_domain(r, (double)nu, N, "taylor_step");
    const ExactNode lo = exact_node(r, t, nu - 1);
    const ExactNode hi = exact_node(r, t, nu + 1);
    TaylorStep out;
    if (nu == 1) {
        // n_2 - n_0 = (S_2 + F_2)/2 - (S_0 + F_0); rational = -(1/r) m_2.
        const i128 ip = (i128)hi.S - 2 * (i128)lo.S;
        out.lhs = (double)(((long double)ip + ((long double)hi.F - 2.0L * (long double)lo.F)) / 2.0L);
        out.rational = (double)(-(long double)hi.p / (2.0L * (long double)r));
    } else {
        // Common denominator (nu+1)(nu-1): integer and fractional parts split.
        const i128 ip = (i128)(nu - 1) * (i128)hi.S - (i128)(nu + 1) * (i128)lo.S;
        const long double fp =
            (long double)(nu - 1) * (long double)hi.F - (long double)(nu + 1) * (long double)lo.F;
        const long double den = (long double)(nu + 1) * (long double)(nu - 1);
        out.lhs = (double)(((long double)ip + fp) / den);
        const i128 mnum = (i128)(nu - 1) * (i128)hi.p - (i128)(nu + 1) * (i128)lo.p;
        out.rational = (double)(-(long double)nu * (long double)mnum / ((long double)r * den));
    }
    out.g = (double)g_exact(r, t, nu, N).g;
    out.residual = std::abs(out.lhs - out.rational - out.g);
    return out;
}

double taylor_step_check(i64 r, u128 t, i64 nu, int N) {
    return taylor_step(r, t, nu, N).residual;
}

// ---------------------------------------------------------------------------
// chain residuals

double ChainResiduals::gap(const std::string& a, const std::string& b) const {
    const std::string key = a < b ? a + "|" + b : b + "|" + a;
    auto it = gaps.find(key);
    if (it == gaps.end())
        throw std::out_of_range("ChainResiduals::gap: no entry for " + key);
    return it->second;
}

ChainResiduals chain_residuals(i64 r, u64 t, int N, bool with_poisson) {
    ChainResiduals out;
    out.r = r;
    out.t = t;
    out.direct = direct_sum(r, t);
    out.stationary = stationary_phase_sum(r, t);
    out.n_form = n_form_sum(r, t);
    out.reformulated = reformulated_sum(r, t, N);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.poisson = ComplexValue{nan, nan};
    std::vector<std::pair<std::string, ComplexValue>> vals{
        {"direct", out.direct},
        {"n_form", out.n_form},
        {"reformulated", out.reformulated},
        {"stationary", out.stationary},
    };
    if (with_poisson) {
        out.poisson = poisson_rhs(r, t).value;
        vals.push_back({"poisson", out.poisson});
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            out.gaps[vals[i].first + "|" + vals[j].first] = std::abs(vals[i].second - vals[j].second);
    return out;
}

} // namespace circlelab
