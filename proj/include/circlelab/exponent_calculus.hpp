#pragma once
// Exact-rational bookkeeping for power-law bound manipulation.
//
// A TermExpr is a monomial t^a r^b omega^c rho^d R^e R1^f R2^g (log)^k with
// exact rational exponents and an integer log power; a BoundExpr is a finite
// union of such terms under max-of-terms semantics, multiplicative constants
// suppressed throughout.  The operations mechanize the classical exponent
// juggling: balancing two terms for a variable, substituting the result,
// Abel/dyadic summation over r, cutoff selection, evaluation at power-of-t
// assignments, and pruning of terms dominated over a declared exponent box.
// Scripted pipelines (derive_section) rebuild the full estimate chains and
// record every step in a replayable audit trail.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace circlelab {

// ---------------------------------------------------------------- rationals

// Always stored reduced with positive denominator.  All arithmetic is exact;
// any reduced result outside the signed 64-bit range throws overflow_error.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  bool is_zero() const { return num == 0; }
  bool is_negative() const { return num < 0; }
  std::string str() const;               // "a" or "a/b", b > 1
  static Rational parse(const std::string& text);
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator-(const Rational& a);
Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);
bool operator==(const Rational& a, const Rational& b);
bool operator!=(const Rational& a, const Rational& b);
bool operator<(const Rational& a, const Rational& b);
bool operator<=(const Rational& a, const Rational& b);
bool operator>(const Rational& a, const Rational& b);
bool operator>=(const Rational& a, const Rational& b);

// ------------------------------------------------------------------ symbols

enum class Sym { t, r, omega, rho, R, R1, R2 };

const char* sym_name(Sym s);
std::optional<Sym> sym_from_name(const std::string& name);

// -------------------------------------------------------------------- terms

struct TermExpr {
  std::map<Sym, Rational> exps;  // zero exponents are never stored
  int logpow = 0;

  Rational exp(Sym s) const;
  TermExpr& set(Sym s, const Rational& e);  // erases the entry when e == 0
  std::string str() const;                  // e.g. "t^{9/28} R1^{-1/14} log"
};

// Convenience constructor: T({{Sym::t, {9, 28}}, {Sym::R1, {-1, 14}}}, 1).
TermExpr T(std::initializer_list<std::pair<Sym, Rational>> exps, int logpow = 0);

bool operator==(const TermExpr& a, const TermExpr& b);
bool operator!=(const TermExpr& a, const TermExpr& b);
bool term_less(const TermExpr& a, const TermExpr& b);  // canonical total order

TermExpr mul(const TermExpr& a, const TermExpr& b);
// Raises a log-free term to an exact rational power.
TermExpr pow(const TermExpr& a, const Rational& q);

// ------------------------------------------------------------------- bounds

struct BoundExpr {
  std::vector<TermExpr> terms;  // kept sorted; equal exponent maps merged

  std::string str() const;
};

BoundExpr make_bound(std::initializer_list<TermExpr> terms);
BoundExpr normalize(BoundExpr b);
BoundExpr union_bounds(const BoundExpr& a, const BoundExpr& b);
bool operator==(const BoundExpr& a, const BoundExpr& b);

// --------------------------------------------------------------- operations

// Solves a = b for var exactly; returns var as a log-free monomial in the
// remaining variables (log factors are ignored).  Symmetric in a and b.
TermExpr balance(const TermExpr& a, const TermExpr& b, Sym var);

// Replaces var by a log-free monomial not containing var.  The identity
// substitution var -> var is accepted and returns the input unchanged.
TermExpr substitute(const TermExpr& term, Sym var, const TermExpr& value);
BoundExpr substitute(const BoundExpr& bound, Sym var, const TermExpr& value);

// Sums a per-r term over a dyadic r-range with constant suppression:
// r-exponent b > -1 charges upper^{b+1}, b < -1 charges lower^{b+1},
// b == -1 adds one log power.  Only the needed limit must be present.
TermExpr sum_over_r(const TermExpr& term, const std::optional<TermExpr>& lower,
                    const std::optional<TermExpr>& upper);
BoundExpr sum_over_r(const BoundExpr& bound, const std::optional<TermExpr>& lower,
                     const std::optional<TermExpr>& upper);

// Solves a = b for R_symbol = t^gamma; a and b may involve only t and
// R_symbol (log powers are ignored).
Rational choose_R(const TermExpr& a, const TermExpr& b, Sym R_symbol);

// var -> exponent gamma, meaning var = t^gamma.
using Assignment = std::map<Sym, Rational>;

// Total t-exponent of a term once every non-t variable it uses is assigned.
Rational t_exponent_at(const TermExpr& term, const Assignment& assignments);

struct DominantResult {
  Rational exponent;            // the maximal total t-exponent
  std::vector<TermExpr> terms;  // all maximizers, in canonical order
};
DominantResult dominant(const BoundExpr& bound, const Assignment& assignments);

// Substitutes t^gamma for each assigned variable.
BoundExpr evaluate_at(const BoundExpr& bound, const Assignment& assignments);

// var -> closed range [lo, hi] of admissible t-exponents.
using ExponentBox = std::map<Sym, std::pair<Rational, Rational>>;

// Drops every term that another term majorizes across the whole box: strict
// exponent dominance always wins; exponent ties defer to the log power.
// Variables outside the box block domination unless their exponents cancel.
BoundExpr prune_dominated(const BoundExpr& bound, const ExponentBox& box);

// ------------------------------------------------------------- audit trail

struct DerivationStep {
  std::string kind;    // balance|substitute|sum_over_r|choose_R|evaluate_at|prune|assemble
  std::string anchor;  // display label of the estimate chain, e.g. "3.17"
  std::string note;
  nlohmann::json inputs;
  nlohmann::json output;
};

struct Derivation {
  std::string section;
  std::vector<DerivationStep> steps;
  BoundExpr final_bound;

  // t-exponents of the fully resolved (pure-t) final terms, descending.
  std::vector<Rational> final_exponents() const;
};

nlohmann::json rational_to_json(const Rational& q);
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json term_to_json(const TermExpr& term);
TermExpr term_from_json(const nlohmann::json& j);
nlohmann::json bound_to_json(const BoundExpr& bound);
BoundExpr bound_from_json(const nlohmann::json& j);
nlohmann::json derivation_to_json(const Derivation& d);
std::string derivation_to_text(const Derivation& d);

// Re-executes every recorded step from its stored inputs and verifies the
// stored output bit-for-bit; throws logic_error on any mismatch.
void replay(const Derivation& d);

// ---------------------------------------------------------------- pipelines

// Frozen right-hand sides of the interval estimates used by the pipelines:
// ids 3.9, 3.14, 4.4, 4.5, 4.12, 4.13, 6.2.
BoundExpr gk_template(const std::string& id);

// Scripted derivations: sections "3", "4a", "4b", "5", "6", and the
// speculative variant "6-whatif".  Section 5 defaults to the strongest
// available feed beta = 3393/10936; derive_section5 takes beta explicitly.
Derivation derive_section(const std::string& section);
Derivation derive_section5(const Rational& beta);

}  // namespace circlelab
