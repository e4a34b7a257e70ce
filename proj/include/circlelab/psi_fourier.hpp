// psi_fourier: the truncated Fourier expansion of the boundary sawtooth sum
//   -(1/pi) sum_{m=0}^{floor(sqrt(t/2))} sum_{r=1}^{R} sin(2 pi r sqrt(t-m^2)) / r,
// the annulus histogram of rounded boundary points (shell index by signed
// radial defect), and the normalized tail-bound ratio
//   |psi_sum(t) - truncated_fourier_sum(t,R)| / (t^(1/2+eps) / R).

#pragma once

#include "circlelab/lattice_counts.hpp"
#include "circlelab/numeric_core.hpp"

#include <map>

namespace circlelab {

// Summation order: m outer (0..floor(sqrt(t/2))), r inner (1..R), one
// compensated accumulator; deterministic.  Requires t <= 1e12, R >= 1.
double truncated_fourier_sum(u64 t, u64 R);

struct AnnulusHistogram {
    u64 t = 0;
    u64 shells = 0;            // R: shell count on each side of the circle
    std::map<i64, u64> counts; // shell index k in [-R, R-1] -> multiplicity
};

// For each m in 0..floor(sqrt(t/2)) round sqrt(t - m^2) to the nearest integer
// n (ties toward the smaller n), and bin by k = floor(2R * d) clamped to
// [-R, R-1], where d = sqrt(m^2+n^2) - sqrt(t) is computed from the exact
// integer numerator m^2 + n^2 - t.  Requires t <= 1e12.
AnnulusHistogram annulus_histogram(u64 t, u64 R);

// |psi_sum(t).sum - truncated_fourier_sum(t, R)| / (t^(1/2+eps) / R).
double tail_bound_check(u64 t, u64 R, double eps);

} // namespace circlelab
