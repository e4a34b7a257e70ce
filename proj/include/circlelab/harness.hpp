#pragma once

// Command-line front end: experiment sweeps over the lattice counters, the
// exponential-sum residual chain, scripted exponent derivations, power-law
// fitting, and CSV/JSON/SVG emission.  Everything routes through run_cli so
// tests can drive the full surface in-process.

#include "circlelab/numeric_core.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace circlelab::harness {

// One sweep row.  p and delta come from count_lattice_points, psi_sum and
// prop_residual from psi_sum (the eight-fold sector identity residual).
// error is empty on success; a failed row keeps its t and carries the
// message instead of values.
struct SweepRecord {
    u64 t = 0;
    u64 p = 0;
    double delta = 0;
    double psi_sum = 0;
    double prop_residual = 0;
    std::map<std::string, double> extra;
    std::string error;
};

// Least-squares line fit; slope/intercept in the (possibly log-log
// transformed) coordinates actually fitted.
struct FitResult {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    int n_points = 0;
};

// Serialize a double with 17 significant digits (round-trip exact).
std::string fmt17(double v);

// Log-spaced integer grid from t_min to t_max inclusive, points >= 2,
// t_min >= 1.  Endpoints are exact; interior points are rounded.
std::vector<u64> sweep_grid(u64 t_min, u64 t_max, int points);

// Compute one row; never throws (failures land in .error).
SweepRecord sweep_record(u64 t);

// Compute all rows on a worker pool of `jobs` threads (clamped to [1,256]).
// Output order is the grid order regardless of scheduling.
std::vector<SweepRecord> run_sweep(u64 t_min, u64 t_max, int points, int jobs);

// Header "t,p,delta,psi_sum,prop_residual,error" plus one line per record,
// numbers at 17 significant digits.  Byte-identical for identical records.
std::string csv_from_records(const std::vector<SweepRecord>& records);

// Straight-line least squares of y against x; requires >= 3 points and
// nonzero x variance.
FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Parse a CSV with a header row and fit column ycol against column xcol.
// loglog fits ln|y| vs ln|x| and skips rows where either value is zero or
// not finite.  Rows whose fields fail to parse (e.g. inline error rows) are
// skipped; fewer than 3 usable rows is an error.
FitResult fit_csv(std::istream& csv, const std::string& xcol, const std::string& ycol,
                  bool loglog);

// Minimal SVG 1.1 scatter plot of ycol against xcol with axis frame and
// min/max tick labels.  loglog transforms both axes.
std::string svg_scatter(std::istream& csv, const std::string& xcol,
                        const std::string& ycol, bool loglog);

// Full CLI: subcommands count, sweep, expsum, psi, exponents, fit, plot.
// Returns the process exit status; all output goes to the given streams.
// --format json failures emit a machine-readable {"error": ...} object on
// out and return nonzero.  CIRCLELAB_JOBS sets the default worker count;
// --config FILE supplies key=value defaults; explicit flags win.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace circlelab::harness
