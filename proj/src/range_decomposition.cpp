#include "circlelab/range_decomposition.hpp"

#include "circlelab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace circlelab {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::out_of_range(what);
}

long double factorial(int n) {
    long double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// ---------------------------------------------------------------------------
// truncated Taylor jets: c[k] = f^{(k)}(u0) / k!

constexpr int kJetLen = 8; // derivatives of G2 up to order 7 (N <= 8)

struct Jet {
    std::array<long double, kJetLen> c{};
};

Jet jet_const(long double v) {
    Jet j;
    j.c[0] = v;
    return j;
}

Jet jet_var(long double u0) {
    Jet j;
    j.c[0] = u0;
    j.c[1] = 1;
    return j;
}

Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k < kJetLen; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k < kJetLen; ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k < kJetLen; ++k)
        for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
    return r;
}

Jet operator*(long double s, const Jet& a) {
    Jet r;
    for (int k = 0; k < kJetLen; ++k) r.c[k] = s * a.c[k];
    return r;
}

// a^p for a.c[0] > 0 via the standard power recurrence
// w_k = (1/(k a_0)) sum_{j=1..k} ((p+1) j - k) a_j w_{k-j}.
Jet jet_pow(const Jet& a, long double p) {
    Jet w;
    w.c[0] = powl(a.c[0], p);
    for (int k = 1; k < kJetLen; ++k) {
        long double s = 0;
        for (int j = 1; j <= k; ++j) s += ((p + 1) * j - k) * a.c[j] * w.c[k - j];
        w.c[k] = s / (k * a.c[0]);
    }
    return w;
}

Jet jet_ipow(const Jet& a, int n) {
    Jet r = jet_const(1.0L);
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

// G2(u) as a jet at u0: same closed composition as the scalar implementation,
// odd outer orders i, odd inner x-derivative orders k.
Jet g2_jet(i64 r, u64 t, long double u0, int N) {
    const long double r2 = (long double)r * (long double)r;
    const long double tv = (long double)t;
    const long double st = sqrtl(tv);

    const Jet U = jet_var(u0);
    const Jet U2 = U * U;
    const Jet B = jet_const(r2) + U2;
    const Jet X = st * (U * jet_pow(B, -0.5L));
    const Jet X2 = X * X;
    const Jet YS = jet_const(tv) - X2; // y^2 at x(u)

    // y^{(i)}(x(u)) from the closed table N_i(x) / y^{2i-1}
    std::array<Jet, kJetLen> yd;
    yd[3] = (-3.0L * tv) * (X * jet_pow(YS, -2.5L));
    yd[5] = (-15.0L * tv) * ((X * (jet_const(3.0L * tv) + 4.0L * X2)) * jet_pow(YS, -4.5L));
    yd[7] = (-1.0L) * ((X * (jet_const(1575.0L * tv * tv * tv) + 6300.0L * tv * tv * X2 +
                             2520.0L * tv * (X2 * X2))) *
                       jet_pow(YS, -6.5L));

    // x^{(k)}(u) = sqrt(t) P_k(u) B^{-(2k+1)/2}
    std::array<Jet, 6> xd;
    xd[1] = st * (jet_const(r2) * jet_pow(B, -1.5L));
    xd[3] = st * ((3.0L * r2 * (4.0L * U2 - jet_const(r2))) * jet_pow(B, -3.5L));
    xd[5] = st * ((45.0L * r2 * (jet_const(r2 * r2) - 12.0L * r2 * U2 + 8.0L * (U2 * U2))) *
                  jet_pow(B, -5.5L));

    Jet g2 = jet_const(0.0L);
    for (int i = 3; i <= N - 1; i += 2) {
        Jet s = jet_const(0.0L);
        for (int k = 1; k <= N - i; k += 2) s = s + (1.0L / factorial(k)) * xd[k];
        g2 = g2 + (2.0L / factorial(i)) * (yd[i] * jet_ipow(s, i));
    }
    return g2;
}

// scaled derivative polynomials W_l
long double w_poly(int l, long double r2, long double nu) {
    const long double n2 = nu * nu;
    switch (l) {
    case 0: return -nu;
    case 1: return 4.0L * n2 - r2;
    case 2: return -5.0L * nu * (4.0L * n2 - 3.0L * r2);
    case 3: return 15.0L * (8.0L * n2 * n2 - 12.0L * n2 * r2 + r2 * r2);
    default: return -105.0L * nu * (8.0L * n2 * n2 - 20.0L * n2 * r2 + 5.0L * r2 * r2);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// closed-form derivatives

double g2_main_derivative(i64 r, u64 t, double nu, int l) {
    require(r >= 1, "g2_main_derivative: r must be positive");
    require(l >= 0 && l <= 4, "g2_main_derivative: l must lie in [0, 4]");
    require(nu >= 0.0 && nu <= (double)r, "g2_main_derivative: nu must lie in [0, r]");
    const long double r2 = (long double)r * (long double)r;
    const long double B = r2 + (long double)nu * (long double)nu;
    return (double)((long double)r * sqrtl((long double)t) * w_poly(l, r2, nu) /
                    powl(B, (5.0L + 2.0L * l) / 2.0L));
}

double derivative_root(int l, i64 r) {
    require(l >= 2 && l <= 4, "derivative_root: l must lie in [2, 4]");
    require(r >= 1, "derivative_root: r must be positive");
    switch (l) {
    case 2: return std::sqrt(3.0) / 2.0 * (double)r;
    case 3: return std::sqrt(3.0 - std::sqrt(7.0)) / 2.0 * (double)r;
    default: return std::sqrt(5.0 - std::sqrt(15.0)) / 2.0 * (double)r;
    }
}

double finite_difference_check(i64 r, u64 t, int l, int N) {
    require(l >= 0 && l <= 4, "finite_difference_check: l must lie in [0, 4]");
    require(r >= 50, "finite_difference_check: r must be at least 50");
    auto g2 = [&](i64 nu) { return g_funcs(r, (u128)t, (double)nu, N).g2; };
    double mx = 0;
    for (i64 nu = 3; nu <= r - 3; ++nu) {
        double fd;
        switch (l) {
        case 0: fd = g2(nu); break;
        case 1: fd = (g2(nu + 1) - g2(nu - 1)) / 2.0; break;
        case 2: fd = g2(nu + 1) - 2.0 * g2(nu) + g2(nu - 1); break;
        case 3:
            fd = (g2(nu + 2) - 2.0 * g2(nu + 1) + 2.0 * g2(nu - 1) - g2(nu - 2)) / 2.0;
            break;
        default:
            fd = g2(nu + 2) - 4.0 * g2(nu + 1) + 6.0 * g2(nu) - 4.0 * g2(nu - 1) + g2(nu - 2);
            break;
        }
        mx = std::max(mx, std::fabs(fd - g2_main_derivative(r, t, (double)nu, l)));
    }
    return mx;
}

// ---------------------------------------------------------------------------
// cuts

int RangeCut::interval_of(double nu) const {
    if (boundaries.empty() || nu < boundaries.front() || nu > boundaries.back()) return -1;
    for (int i = 0; i + 1 < (int)boundaries.size(); ++i)
        if (nu <= boundaries[i + 1]) return i;
    return -1;
}

RangeCut build_cut(i64 r, CutKind kind, double width, u64 t) {
    require(r >= 2, "build_cut: r must be at least 2");
    if (t > 0)
        require(width > std::pow((double)t, 0.01),
                "build_cut: width <= t^{1/100} (asymptotic floor)");
    RangeCut cut;
    cut.r = r;
    cut.kind = kind;
    cut.width = width;
    if (kind == CutKind::I) {
        const double nu0 = std::sqrt(3.0) / 2.0 * (double)r;
        require(width > 1.0, "build_cut: width <= 1 (I0 would be empty)");
        require(width < (1.0 - std::sqrt(3.0) / 2.0) * (double)r,
                "build_cut: width >= (1 - sqrt(3)/2) r (I intervals would overlap)");
        cut.boundaries = {1.0, width, nu0 - width, nu0 + width, (double)r};
    } else {
        const double eta = std::sqrt(3.0 - std::sqrt(7.0)) / 2.0 * (double)r;
        require(width > 0.0, "build_cut: width must be positive");
        require(width < eta,
                "build_cut: width >= (sqrt(3 - sqrt(7))/2) r (J1 would be empty)");
        cut.boundaries = {0.0, eta - width, eta + width, (double)r};
    }
    return cut;
}

double j2_width_cap(i64 r) {
    return (std::sqrt(5.0 - std::sqrt(15.0)) - std::sqrt(3.0 - std::sqrt(7.0))) / 4.0 *
           (double)r;
}

std::vector<EnvelopeReport> envelope_check(i64 r, u64 t, const RangeCut& cut) {
    require(cut.r == r, "envelope_check: cut was built for a different r");
    const double st = std::sqrt((double)t);
    auto sample = [&](int idx, int l, double lo_env, double hi_env) {
        const double a = cut.boundaries[idx], b = cut.boundaries[idx + 1];
        const double eps = (b - a) * 1e-6;
        double mn = std::numeric_limits<double>::infinity(), mx = 0;
        for (int s = 0; s <= 256; ++s) {
            double nu = a + eps + (b - a - 2 * eps) * s / 256.0;
            double d = std::fabs(g2_main_derivative(r, t, nu, l));
            mn = std::min(mn, d);
            mx = std::max(mx, d);
        }
        return EnvelopeReport{"", mn / lo_env, mx / hi_env};
    };
    std::vector<EnvelopeReport> out;
    const double w = cut.width;
    const double r5 = std::pow((double)r, 5), r6 = std::pow((double)r, 6),
                 r7 = std::pow((double)r, 7);
    if (cut.kind == CutKind::I) {
        EnvelopeReport i1 = sample(1, 2, w * st / r6, st / r5);
        i1.label = "I1";
        EnvelopeReport i3 = sample(3, 2, w * st / r6, st / r5);
        i3.label = "I3";
        out = {i1, i3};
    } else {
        EnvelopeReport j1 = sample(0, 3, w * st / r7, st / r6);
        j1.label = "J1";
        EnvelopeReport j3 = sample(2, 3, w * st / r7, st / r6);
        j3.label = "J3";
        out = {j1, j3};
        if (w < j2_width_cap(r)) {
            EnvelopeReport j2 = sample(1, 4, st / r7, st / r7);
            j2.label = "J2";
            out.push_back(j2);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// parity-split partial sums

ComplexValue partial_sum(i64 r, u64 t, i64 r1, Parity parity, const RangeCut& cut,
                         const std::vector<int>& which, int N) {
    require(cut.r == r, "partial_sum: cut was built for a different r");
    require(r1 >= 0 && r1 <= r, "partial_sum: r1 must lie in [0, r]");
    if (which.empty()) return {0.0, 0.0};
    const std::vector<double> f2 = f2_profile(r, (u128)t, N);
    NeumaierSum re, im;
    const int want = parity == Parity::odd ? 1 : 0;
    for (i64 nu = 1; nu <= r1; ++nu) {
        if ((int)(nu & 1) != want) continue;
        if (std::find(which.begin(), which.end(), cut.interval_of((double)nu)) == which.end())
            continue;
        long double ph = (long double)r * (long double)f2[nu];
        ph -= floorl(ph);
        ComplexValue e = unit_exp((double)ph);
        re.add(e.real());
        im.add(e.imag());
    }
    return {re.value(), im.value()};
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin surrogate

namespace {

// Bernoulli numbers B_0..B_12 via the defining recurrence, exact.
Rational bernoulli(int n) {
    require(n >= 0 && n <= 12, "bernoulli: order must lie in [0, 12]");
    std::vector<Rational> B(n + 1);
    for (int m = 0; m <= n; ++m) {
        if (m == 0) {
            B[0] = Rational(1);
            continue;
        }
        // sum_{k=0}^{m} C(m+1,k) B_k = 0
        Rational s(0);
        i64 binom = 1; // C(m+1, 0)
        for (int k = 0; k < m; ++k) {
            s = s + Rational(binom) * B[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        B[m] = -s / Rational(m + 1);
    }
    return B[n];
}

} // namespace

Rational bernoulli_half(int j) {
    require(j >= 0 && j <= 12, "bernoulli_half: order must lie in [0, 12]");
    if (j == 0) return bernoulli(0);
    i64 p = 1;
    for (int i = 0; i < j - 1; ++i) p *= 2; // 2^{j-1}
    const Rational scale = Rational(1, p) - Rational(1); // 2^{1-j} - 1
    return scale * bernoulli(j);
}

Rational em_midpoint_coefficient(int j) {
    require(j >= 2 && j <= 12, "em_midpoint_coefficient: order must lie in [2, 12]");
    i64 p = 1, f = 1;
    for (int i = 0; i < j - 1; ++i) p *= 2;
    for (int i = 2; i <= j; ++i) f *= i;
    return Rational(p) * bernoulli_half(j) / Rational(f);
}

Rational em_convention_coefficient(int j) {
    return Rational(2) * em_midpoint_coefficient(j);
}

double euler_maclaurin_F3(i64 r, u64 t, i64 nu1, i64 nu, int N) {
    require(N >= 4 && N <= 8, "euler_maclaurin_F3: N must lie in [4, 8]");
    require((nu1 & 1) == 1 && (nu & 1) == 1, "euler_maclaurin_F3: nu1 and nu must be odd");
    require(nu1 >= 3 && nu <= r - 3, "euler_maclaurin_F3: need 3 <= nu1, nu <= r - 3");
    require(nu >= nu1, "euler_maclaurin_F3: nu must be at least nu1");
    if (nu == nu1) return 0.0;

    auto g2 = [&](double u) { return g_funcs(r, (u128)t, u, N).g2; };
    auto integ = quad::adaptive_gk15(g2, (double)nu1, (double)nu, 1e-13, 28);

    const Jet at_a = g2_jet(r, t, (long double)nu1, N);
    const Jet at_b = g2_jet(r, t, (long double)nu, N);
    long double corr = 0;
    for (int j = 2; j <= N; j += 2) { // odd j coefficients vanish
        const Rational c = em_midpoint_coefficient(j);
        const long double cj = (long double)c.num / (long double)c.den;
        // G2^{(j-1)} = (j-1)! * jet coefficient j-1
        corr += cj * factorial(j - 1) * (at_b.c[j - 1] - at_a.c[j - 1]);
    }
    return (double)(0.5L * (long double)integ.value + corr);
}

double em_residual(i64 r, u64 t, i64 nu1, i64 nu, int N) {
    const double f3 = euler_maclaurin_F3(r, t, nu1, nu, N);
    long double lhs = 0; // F2(nu) - F2(nu1) = sum of G2 over the even points between
    for (i64 w = nu1 + 1; w < nu; w += 2) lhs += (long double)g_funcs(r, (u128)t, (double)w, N).g2;
    return (double)fabsl(lhs - (long double)f3);
}

// ---------------------------------------------------------------------------
// quoted bound shapes

double gk_prediction(const std::string& template_id, double r, double t, double width) {
    require(r > 0 && t > 1, "gk_prediction: need r > 0 and t > 1");
    const BoundExpr b = gk_template(template_id);
    double total = 0;
    for (const TermExpr& term : b.terms) {
        double v = 1.0;
        for (const auto& [sym, q] : term.exps) {
            double base;
            switch (sym) {
            case Sym::t: base = t; break;
            case Sym::r: base = r; break;
            case Sym::omega:
            case Sym::rho:
                require(width > 0, "gk_prediction: this template needs a positive width");
                base = width;
                break;
            default: base = r; break; // post-summation radii R, R1, R2
            }
            v *= std::pow(base, (double)q.num / (double)q.den);
        }
        for (int i = 0; i < term.logpow; ++i) v *= std::log(t);
        total += v;
    }
    return total;
}

} // namespace circlelab
