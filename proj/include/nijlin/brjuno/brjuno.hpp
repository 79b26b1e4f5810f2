#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nijlin/brjuno/continued_fraction.hpp"

namespace nijlin {

/// One partial sum S_n = Σ_{i=0}^{n} log(q_{i+1})/q_i (q_0 = 1). When some
/// q_{i+1} is out of reach, the growth rule's certified floor replaces the
/// term and `lower_bound` is set: the true S_n is then at least `value`.
struct BrjunoPartialSum {
  std::size_t n;
  double value;
  double term;
  bool lower_bound;
};

/// S_0 … S_n. Throws DomainError when the expansion is shorter than n + 1
/// quotients and no certified floor is available.
std::vector<BrjunoPartialSum> brjuno_partial_sums(const ContinuedFraction& cf, std::size_t n);
BrjunoPartialSum brjuno_partial_sum(const ContinuedFraction& cf, std::size_t n);

/// A continued fraction whose Brjuno series provably diverges: growth rule
/// from the first quotient after `prefix`. Throws DomainError for a rule
/// without a certified floor or one that falls below exp(q_n) on the first
/// computable quotients. Negate the result for the Σ_u representative.
ContinuedFraction make_liouville(const GrowthRule& rule, std::vector<mpz_class> prefix = {});

/// Three-valued answer for set membership.
enum class Tri { No, Yes, Unknown };
std::string to_string(Tri t);

/// α as the library meets it: exact rational, float of known precision, or
/// an irrational given by its continued fraction.
struct Alpha {
  std::variant<Rational, BigFloat, ContinuedFraction> value;

  bool is_rational() const { return std::holds_alternative<Rational>(value); }
  bool is_float() const { return std::holds_alternative<BigFloat>(value); }
  bool is_cf() const { return std::holds_alternative<ContinuedFraction>(value); }
  int sign() const;
  /// The value in a float context (continued fractions are evaluated).
  BigFloat to_float(mpfr_prec_t bits) const;
  double to_double() const;
  std::string describe() const;
};

/// Rational or decimal text is exact; anything the continued-fraction
/// parser accepts becomes a CF handle. With `float_bits` set, decimal text
/// is read as a float of that precision instead.
Alpha parse_alpha(std::string_view text, std::optional<mpfr_prec_t> float_bits = std::nullopt);

struct SigmaFlags {
  Tri in_sigma_sm;
  Tri in_sigma_an;
  std::string reason;
};

/// Membership in Σ_sm = {α ≤ 0} ∪ {integers ≥ 3} ∪ {1/m : m ≥ 2} and
/// Σ_an = {negative rationals} ∪ {0} ∪ {integers ≥ 3} ∪ {1/m : m ≥ 2}.
/// Floats decide only the open condition α < 0. Σ_an ⊂ Σ_sm is checked on
/// every answer.
SigmaFlags sigma_membership(const Alpha& alpha);
SigmaFlags sigma_membership(const Rational& alpha);

enum class BrjunoDecision { Brjuno, NonBrjuno, Inconclusive };
std::string to_string(BrjunoDecision d);

struct BrjunoPolicy {
  std::size_t depth = 40;
  double divergence_threshold = 10.0;
};

struct BrjunoCertificate {
  BrjunoDecision decision;
  std::string reason;
  std::size_t depth;
  std::vector<BrjunoPartialSum> partial_sums;
  /// For NonBrjuno: first n with certified S_n > threshold.
  std::optional<std::size_t> threshold_depth;
};

/// Brjuno for eventually periodic quotients, NonBrjuno for growth rules
/// with a floor, Inconclusive otherwise; partial sums always attached.
BrjunoCertificate brjuno_decide(const ContinuedFraction& cf, const BrjunoPolicy& policy = {});

}  // namespace nijlin
