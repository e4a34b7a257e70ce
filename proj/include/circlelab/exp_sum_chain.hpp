// exp_sum_chain: the transformation chain for the exponential sum
//   S(r,t) = sum_{m=0}^{floor(sqrt(t/2))} e(r*sqrt(t - m^2)) / r.
// Five representations are computed side by side: the direct sum, the Poisson
// right-hand side (one oscillatory integral per frequency 0..r), the
// stationary-phase main-term sum, the rational-node phase sum e(r*n_nu), and
// the reformulated sum e(omega_nu) e(r*F2(nu)).  Residuals between consecutive
// representations are the measured objects; each has an analytic envelope.
//
// Node geometry: x_nu = nu*sqrt(t)/sqrt(r^2+nu^2) is the stationary point of
// r*sqrt(t-x^2) + nu*x; y_nu = r*sqrt(t)/sqrt(B), B = r^2 + nu^2; m_nu is the
// largest rational with denominator nu that is <= x_nu (m_0 = 0);
// lambda_nu = x_nu - m_nu in [0, 1/nu); n_nu = sqrt(t - m_nu^2).
// All node fields come from exact integer paths: with p = floor(nu*x_nu) =
// isqrt(floor(t*nu^4 / B)), m_nu = p/nu, and n_nu, phases, and lambda are
// derived from 128-bit radicands, so they stay accurate at t up to ~2^100/nu^2
// (guard: bits(t) + 4*bits(nu) <= 126).

#pragma once

#include "circlelab/numeric_core.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace circlelab {

// ---------------------------------------------------------------------------
// domain types

struct Node {
    i64 nu = 0;
    double x = 0;      // nu*sqrt(t)/sqrt(r^2+nu^2)
    double y = 0;      // r*sqrt(t)/sqrt(r^2+nu^2)
    i64 m_num = 0;     // numerator of m: m = m_num/nu for nu >= 1, m_0 = 0
    double m = 0;      // largest rational with denominator nu at most x
    double lambda = 0; // x - m, in [0, 1/nu)
    double n = 0;      // sqrt(t - m^2)
};

// Oscillatory integral (or a 1/r-weighted sum of them) with its achieved
// error estimate; converged == false reports non-convergence, value is still
// the best estimate.
struct OscIntegral {
    ComplexValue value{0.0, 0.0};
    double err_estimate = 0;
    bool converged = true;
    u64 evals = 0;
};

struct GTriple {
    double g = 0;  // neighbor rational nodes m_{nu +- 1}; NaN at non-integer nu
    double g1 = 0; // exact neighbor abscissas x_{nu +- 1}; NaN at non-integer nu
    double g2 = 0; // odd-order Taylor-compressed analytic form; any real nu
};

// One double step n_{nu+1} - n_{nu-1} = rational + G(nu) + residual.
struct TaylorStep {
    double lhs = 0;      // n_{nu+1} - n_{nu-1}
    double rational = 0; // -(nu/r)(m_{nu+1} - m_{nu-1}); times r*(nu^2-1) integer
    double g = 0;        // G(nu)
    double residual = 0; // |lhs - rational - g|
};

struct ChainResiduals {
    i64 r = 0;
    u64 t = 0;
    ComplexValue direct{0.0, 0.0};
    ComplexValue poisson{0.0, 0.0}; // NaN when not requested
    ComplexValue stationary{0.0, 0.0};
    ComplexValue n_form{0.0, 0.0};
    ComplexValue reformulated{0.0, 0.0};
    // Pairwise absolute differences keyed "a|b" with a < b lexicographically.
    std::map<std::string, double> gaps;
    // Symmetric accessor; throws std::out_of_range for unknown names.
    double gap(const std::string& a, const std::string& b) const;
};

// ---------------------------------------------------------------------------
// representations of S(r,t)

// Direct evaluation with exact per-term phase reduction and compensated
// summation of both components.  Requires 1 <= r, r^2 <= t, t <= 1e12.
ComplexValue direct_sum(i64 r, u64 t);

// integral_0^floor(sqrt(t/2)) e(r*sqrt(t-x^2) + nu*x) dx by panel walking:
// panel width is capped at a fraction of the local oscillation wavelength
// 1/(|phi'| + sqrt(|phi''|)), each panel integrated by adaptive GK15, and the
// walk splits at the stationary point x_nu.  Requires 0 <= nu <= r and
// 2r <= sqrt(t).  Oracle-grade: cost grows like r*sqrt(t).
OscIntegral oscillatory_integral(i64 r, u64 t, i64 nu, double abs_tol = 1e-6);

// (1/r) * sum_{nu=0}^{r} oscillatory_integral(r, t, nu); errors accumulate.
OscIntegral poisson_rhs(i64 r, u64 t, double abs_tol = 1e-6);

// sum_{nu=0}^r e(sign/8) t^{1/4} B^{-3/4} e(r y_nu + nu x_nu), with the phase
// r y_nu + nu x_nu = sqrt(t*B) reduced mod 1 on the exact 128-bit path.
// eighth_sign = -1 is the stationary-phase value for phi'' < 0; +1 is kept
// only for the sign-calibration test.  Requires 2r <= sqrt(t).
ComplexValue stationary_phase_sum(i64 r, u64 t, int eighth_sign = -1);

// Same envelope factors with phase r*n_nu instead (exact mod-1 reduction via
// r*isqrt(t*nu^2 - p^2) mod nu).  Requires r^2 <= t.
ComplexValue n_form_sum(i64 r, u64 t);

// sum_{nu=0}^r e(sign/8) t^{1/4} B^{-3/4} e(omega_nu) e(r F2(nu)).
ComplexValue reformulated_sum(i64 r, u64 t, int N = 8, int eighth_sign = -1);

// All representations at once.  poisson is computed only when with_poisson
// (it is the expensive oracle); otherwise that field is NaN and its gap
// entries are omitted.
ChainResiduals chain_residuals(i64 r, u64 t, int N = 8, bool with_poisson = false);

// ---------------------------------------------------------------------------
// nodes, phases, and the G/F2/omega ladder
//
// These take t as u128: the node arithmetic stays exact for t far beyond the
// 1e12 summation budget (the total-variation suite runs at t = r^8).

// Requires 1 <= r, r^2 <= t, 0 <= nu <= r, and the 128-bit guard above.
Node node(i64 r, u128 t, i64 nu);

// frac(r*y_nu + nu*x_nu) = frac(sqrt(t*(r^2+nu^2))), exact path.
Phase stationary_phase(i64 r, u128 t, i64 nu);

// frac(r*n_nu), exact path.
Phase n_phase(i64 r, u128 t, i64 nu);

// x(nu) = nu*sqrt(t)/sqrt(r^2+nu^2) at real nu, long-double evaluation.
double chain_x(i64 r, u128 t, double nu);

// d^k x / d nu^k for k = 1..kmax at real nu, from the closed-form polynomial
// recurrence P_{k+1} = P_k' * B - (2k+1) * nu * P_k, x^{(k)} = sqrt(t) P_k B^{-(2k+1)/2}.
// Index k of the result holds x^{(k)}; index 0 is unused.
std::vector<long double> x_derivs(i64 r, u128 t, double nu, int kmax);

// y, y', ..., y^{(imax)} at abscissa x for y = sqrt(t - x^2), via the
// recurrence y y^{(i)} = -[i == 2] - sum_{j=1}^{i-1} C(i-1,j) y^{(j)} y^{(i-j)}.
std::vector<long double> y_derivs(u128 t, double x, int imax);

// G (2-sided rational-node bracket), G1 (exact-abscissa bracket), G2 (odd
// orders only: even-order contributions of the +1 and -1 steps cancel in the
// double difference, so the inner bracket keeps only odd nu-derivatives;
// dropping the spurious even terms is what keeps the l-th derivative of G2
// within O(sqrt(t)/r^{l+4}) of its main term).  Requires 1 <= nu <= r-1,
// 4 <= N <= 12.  G and G1 need integer nu; they are NaN when |nu - round(nu)|
// > 1e-9.
GTriple g_funcs(i64 r, u128 t, double nu, int N = 8);

// F2(0) = n_0, F2(1) = n_1, F2(nu+2) = F2(nu) + G2(nu+1): parity-split prefix
// sums in double, so F2(nu+1) - F2(nu-1) recovers G2(nu) to one rounding of
// the stored values (the additions are Sterbenz-exact to subtract back).
std::vector<double> f2_profile(i64 r, u128 t, int N = 8);

// omega_nu = frac(r * sum of (G - G1) along the parity chain); omega_0 =
// omega_1 = 0.  The G - G1 differences are evaluated in factored form
// (a^i - b^i = (a-b) sum a^j b^{i-1-j}) to avoid cancellation.
std::vector<Phase> omega_coeffs(i64 r, u128 t, int N = 8);

// Variation of the unit-circle coefficients e(w[nu]) accumulated along each
// parity chain: sum_{nu=2}^{end} |e(w[nu]) - e(w[nu-2])|.  Each chain advances
// by one G - G1 correction per step, r*(G - G1)(nu-1) ~ lambda_{nu-2} +
// lambda_nu <= C/nu, so this sum is O(ln r); adjacent indices belong to the
// two independently seeded chains and their gap does not contract.
double total_variation(const std::vector<Phase>& w);

// n_{nu+1} - n_{nu-1} minus its exact rational part and G(nu); the residual
// carries the order-N Taylor truncation, O(sqrt(t)/r^N).
TaylorStep taylor_step(i64 r, u128 t, i64 nu, int N = 8);
double taylor_step_check(i64 r, u128 t, i64 nu, int N = 8);

} // namespace circlelab
