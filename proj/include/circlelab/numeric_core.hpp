// numeric_core: exact integer square roots, split representations of sqrt(n),
// phase reduction of r*sqrt(n) mod 1, the unit exponential e(x) = exp(2*pi*i*x),
// the sawtooth psi(u) = u - floor(u) - 1/2, and compensated summation.
//
// Precision contract: frac_sqrt keeps |f - (sqrt(n) - s)| <= 2^-50 for n <= 1e18
// (and relative ~2^-60 on the 128-bit path), so phase_of(r, .) is accurate to
// ~r * 2^-50 absolute.  All integer roots are exact.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace circlelab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

using ComplexValue = std::complex<double>;

// ---------------------------------------------------------------------------
// exact integer roots

// Largest s with s*s <= n.  Exact for all inputs.
u64 isqrt(u64 n);
u128 isqrt(u128 n);

// ---------------------------------------------------------------------------
// split square roots: sqrt(n) = s + f with s = isqrt(n), f in [0,1)

struct ExactSqrt {
    u128 n = 0;   // radicand
    u128 s = 0;   // integer part, exact
    double f = 0; // fractional part; 0 exactly when n is a perfect square
};

ExactSqrt frac_sqrt(u64 n);
ExactSqrt frac_sqrt(u128 n);

// ---------------------------------------------------------------------------
// phases: values in [0,1) understood mod 1

struct Phase {
    double value = 0; // in [0,1)
};

// x reduced to [0,1).  frac_part(-0.25) = 0.75.
double frac_part(double x);

// frac(r * sqrt(n)) from the split representation: the integer r*s drops out
// exactly and r*f is split into product + fma error before reduction.
Phase phase_of(u64 r, const ExactSqrt& root);

// e(x) = exp(2*pi*i*x); argument is taken mod 1 before evaluation.
ComplexValue unit_exp(double x);

// psi(u) = u - floor(u) - 1/2; equals -1/2 at integers.
double psi(double u);

// ---------------------------------------------------------------------------
// compensated summation (Neumaier): exact for [1, 1e-16, -1] -> 1e-16

class NeumaierSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

double compensated_sum(const std::vector<double>& xs);

} // namespace circlelab
