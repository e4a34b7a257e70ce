// quadrature: embedded Gauss-Kronrod 15(7) panel rule plus a bisection driver.
// Header-only utility shared by the oscillatory-integral and Euler-Maclaurin
// code; error estimate per panel is |K15 - G7|, which overestimates on smooth
// panels and is taken at face value.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace circlelab::quad {

// QUADPACK dqk15 constants, nodes on [-1,1] (symmetric; index 7 is the center).
// Odd indices are the embedded 7-point Gauss nodes.
inline constexpr double kGK15Nodes[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0,
};
inline constexpr double kGK15Weights[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992,
};
inline constexpr double kG7Weights[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
};

template <class F>
struct PanelResult {
    using value_type = decltype(std::declval<F&>()(0.0));
    value_type value{};  // K15 estimate
    double err = 0;      // |K15 - G7|
};

template <class F>
PanelResult<F> gk15_panel(F&& f, double a, double b, std::uint64_t& evals) {
    using T = typename PanelResult<F>::value_type;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    evals += 1;
    T k15 = kGK15Weights[7] * fc;
    T g7 = kG7Weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        T fs = f(c - h * kGK15Nodes[i]) + f(c + h * kGK15Nodes[i]);
        evals += 2;
        k15 += kGK15Weights[i] * fs;
        if (i % 2 == 1) g7 += kG7Weights[i / 2] * fs;
    }
    PanelResult<F> out;
    out.value = h * k15;
    out.err = std::abs(h * k15 - h * g7);
    return out;
}

template <class F>
struct AdaptiveResult {
    using value_type = decltype(std::declval<F&>()(0.0));
    value_type value{};
    double err_estimate = 0;
    bool converged = true;
    std::uint64_t evals = 0;
};

namespace detail {

template <class F, class R>
void adaptive_rec(F& f, double a, double b, double tol, int depth, R& out) {
    auto p = gk15_panel(f, a, b, out.evals);
    if (p.err <= tol || depth <= 0) {
        out.value += p.value;
        out.err_estimate += p.err;
        if (p.err > tol) out.converged = false;
        return;
    }
    double c = 0.5 * (a + b);
    adaptive_rec(f, a, c, 0.5 * tol, depth - 1, out);
    adaptive_rec(f, c, b, 0.5 * tol, depth - 1, out);
}

} // namespace detail

template <class F>
AdaptiveResult<F> adaptive_gk15(F f, double a, double b, double tol, int max_depth = 24) {
    AdaptiveResult<F> out;
    if (a == b) return out;
    detail::adaptive_rec(f, a, b, tol, max_depth, out);
    return out;
}

} // namespace circlelab::quad
