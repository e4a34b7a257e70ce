// lattice_counts: exact lattice-point counts in the disk x^2 + y^2 <= t, the
// error term delta(t) = P(t) - pi*t, the boundary sawtooth sum
//   sum_{m=0}^{floor(sqrt(t/2))} psi(sqrt(t - m^2)),
// a triangle count identity used as a combinatorial cross-check, and the
// one-eighth sector count.
//
// P(t) = 1 + 4*floor(sqrt(t)) + 4*sum_{x=1}^{floor(sqrt(t))} floor(sqrt(t-x^2)).

#pragma once

#include "circlelab/numeric_core.hpp"

namespace circlelab {

struct CircleCount {
    u64 t = 0;
    u64 p = 0;       // number of lattice points with x^2 + y^2 <= t
    double delta = 0; // p - pi*t
};

struct PsiSumResult {
    u64 t = 0;
    double sum = 0;      // compensated sum of psi(sqrt(t - m^2)), m = 0..floor(sqrt(t/2))
    double residual = 0; // sum - (pi*t - P(t))/8; O(1) by the sector identity
};

// Exact count via the row formula.  Requires t <= 1e12.
CircleCount count_lattice_points(u64 t);

// Ground truth by direct enumeration, no integer-root calls (per-row upward
// scan of y using incremental squares).  Requires t <= 1e8.  t = 0 counts the
// origin: returns 1.
u64 brute_force_count(u64 t);

// Requires t <= 1e12 (isqrt/frac_sqrt precision budget for the residual).
PsiSumResult psi_sum(u64 t);

// Lattice points in the closed triangle 0 <= y <= x <= a equal
// a^2/2 + (3/2)a + 1 = (a+1)(a+2)/2.  Returns the enumerated count and
// checks the identity exactly; throws std::logic_error on mismatch.
u64 pick_triangle_check(u64 a);

// Lattice points with 0 <= x < y and x^2 + y^2 <= t.  Requires t <= 1e10.
u64 sector_count(u64 t);

// |8*sector_count(t) + 4*sqrt(t/2) - 4*sqrt(t) - P(t)|, the defect of the
// eight-fold sector decomposition; bounded uniformly in t.
double sector_decomposition_defect(u64 t);

} // namespace circlelab
