// range_decomposition: the interval apparatus wrapped around the G2 main term
//   H(nu) = -r*nu*sqrt(t) / (r^2 + nu^2)^{5/2}.
// Closed-form nu-derivatives of H up to order 4, the I/J interval cuts around
// the derivative roots, two-sided derivative envelopes on each interval,
// parity-split partial sums of e(r*F2(nu)), a midpoint Euler-Maclaurin
// surrogate F3 for the parity-chain prefix sums, and numeric evaluation of
// the quoted exponential-sum bound shapes.
//
// Derivative roots (multiples of r): order 2 vanishes at (sqrt(3)/2) r,
// order 3 at (sqrt(3-sqrt(7))/2) r, order 4 at (sqrt(5-sqrt(15))/2) r.

#pragma once

#include "circlelab/exp_sum_chain.hpp"
#include "circlelab/exponent_calculus.hpp"
#include "circlelab/numeric_core.hpp"

#include <string>
#include <vector>

namespace circlelab {

// ---------------------------------------------------------------------------
// domain types

enum class CutKind { I, J };
enum class Parity { odd, even };

// An ordered decomposition of the frequency range.
//   I-cut (width w):  {1, w, nu0 - w, nu0 + w, r},   nu0 = (sqrt(3)/2) r
//   J-cut (width w):  {0, eta - w, eta + w, r},      eta = (sqrt(3-sqrt(7))/2) r
// Consecutive boundary pairs delimit the intervals (4 for I, 3 for J).
struct RangeCut {
    i64 r = 0;
    CutKind kind = CutKind::I;
    double width = 0;
    std::vector<double> boundaries;

    int interval_count() const { return (int)boundaries.size() - 1; }
    // Index of the interval containing nu (ties go to the lower interval);
    // -1 outside [boundaries.front(), boundaries.back()].
    int interval_of(double nu) const;
};

// Observed |derivative| over an interval, scaled by its predicted envelopes:
// min_ratio = min |d| / lower envelope, max_ratio = max |d| / upper envelope.
struct EnvelopeReport {
    std::string label; // "I1", "I3", "J1", "J2", "J3"
    double min_ratio = 0;
    double max_ratio = 0;
};

// ---------------------------------------------------------------------------
// closed-form derivatives of the main term

// l-th nu-derivative of H(nu) = -r*nu*sqrt(t)*(r^2+nu^2)^{-5/2}, l = 0..4:
//   H^(l) = r*sqrt(t) * W_l(nu) / (r^2+nu^2)^{(5+2l)/2} with
//   W_0 = -nu, W_1 = 4nu^2 - r^2, W_2 = -5nu(4nu^2 - 3r^2),
//   W_3 = 15(8nu^4 - 12nu^2 r^2 + r^4), W_4 = -105nu(8nu^4 - 20nu^2 r^2 + 5r^4).
// Requires 0 <= nu <= r.
double g2_main_derivative(i64 r, u64 t, double nu, int l);

// Algebraic root of the l-th derivative inside (0, r), l = 2, 3, 4.
double derivative_root(int l, i64 r);

// max over integer nu in [3, r-3] of |central difference of G2 - closed form|
// at unit step; the residual carries the order-(l+4) correction term and must
// stay below C*sqrt(t)/r^{l+4}.  Requires 0 <= l <= 4 and r >= 50 (unit-step
// differences need the scale separation).
double finite_difference_check(i64 r, u64 t, int l, int N = 8);

// ---------------------------------------------------------------------------
// interval cuts

// Build an I- or J-cut of the given width.  Verified inequalities, named in
// the thrown error: width > 1 (I) or > 0 (J), width < (1 - sqrt(3)/2) r (I)
// or width < eta (J), and width > t^{1/100} when t > 0 (the asymptotic floor;
// pass t = 0 to skip it).
RangeCut build_cut(i64 r, CutKind kind, double width, u64 t = 0);

// Width cap for the fourth-derivative band on the middle J interval: half the
// gap between the order-3 and order-4 root multipliers,
//   (sqrt(5-sqrt(15)) - sqrt(3-sqrt(7))) / 4 * r.
double j2_width_cap(i64 r);

// Sampled two-sided envelope ratios per interval.
//   I-cut: on I1 and I3, |H''| against [width*sqrt(t)/r^6, sqrt(t)/r^5].
//   J-cut: on J1 and J3, |H'''| against [width*sqrt(t)/r^7, sqrt(t)/r^6];
//          on J2 (only when width < j2_width_cap), |H''''| against
//          [sqrt(t)/r^7, sqrt(t)/r^7] (a pure constant band).
std::vector<EnvelopeReport> envelope_check(i64 r, u64 t, const RangeCut& cut);

// ---------------------------------------------------------------------------
// parity-split partial sums

// sum of e(r * F2(nu)) over nu in [1, r1] of the given parity whose interval
// index (per cut.interval_of) is listed in `which`.  Empty `which` gives 0.
// Requires r1 <= r and cut.r == r.
ComplexValue partial_sum(i64 r, u64 t, i64 r1, Parity parity, const RangeCut& cut,
                         const std::vector<int>& which, int N = 8);

// ---------------------------------------------------------------------------
// midpoint Euler-Maclaurin surrogate

// B_j(1/2) = (2^{1-j} - 1) B_j, exact.
Rational bernoulli_half(int j);

// Coefficient of [G2^{(j-1)}] in the step-2 midpoint formula,
//   sum_{w in (nu1, nu), w of opposite parity} G2(w)
//     = (1/2) Int G2 + sum_j em_midpoint_coefficient(j) [G2^{(j-1)}]:
// 2^{j-1} B_j(1/2) / j!.  Zero for odd j.
Rational em_midpoint_coefficient(int j);

// The 2^j B_j(1/2) / j! normalization (the coefficient as conventionally
// displayed next to the formula; gives -1/6 at j = 2).  The midpoint identity
// itself needs em_midpoint_coefficient.
Rational em_convention_coefficient(int j);

// F3(nu) = (1/2) Int_{nu1}^{nu} G2(u) du
//          + sum_{j=2}^{N} em_midpoint_coefficient(j) (G2^{(j-1)}(nu) - G2^{(j-1)}(nu1)).
// Derivatives of G2 are exact (Taylor-jet arithmetic through the closed
// forms); the integral is adaptive GK15 at 1e-13 absolute tolerance.
// Requires nu1, nu odd, 3 <= nu1, nu <= r - 3, and 4 <= N <= 8.
double euler_maclaurin_F3(i64 r, u64 t, i64 nu1, i64 nu, int N = 8);

// |F2(nu) - F2(nu1) - F3(nu)| with the F2 difference re-accumulated in long
// double (the stored double profile would drown the envelope at large r);
// must stay below C*sqrt(t)/r^{N+2}.
double em_residual(i64 r, u64 t, i64 nu1, i64 nu, int N = 8);

// ---------------------------------------------------------------------------
// quoted bound shapes

// Numeric value of the named bound template (ids 3.9, 3.14, 4.4, 4.5, 4.12,
// 4.13, 6.2): the term list evaluated at t, r and the cut width with all
// constants set to 1 and terms added.  Symbols: t -> t; r -> r; omega and
// rho -> width; the post-summation radii R, R1, R2 -> r.
double gk_prediction(const std::string& template_id, double r, double t, double width);

} // namespace circlelab
