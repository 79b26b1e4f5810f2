#pragma once

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nijlin/field/field.hpp"

namespace nijlin {

/// Rule producing a_{n+1} from q_n for growth-type expansions. `next` returns
/// nullopt once the exact value is too large to materialize; `log_floor` is a
/// certified constant c with log a_{n+1} ≥ c·q_n (0 when nothing is known).
struct GrowthRule {
  std::string name;
  std::function<std::optional<mpz_class>(const mpz_class& q)> next;
  double log_floor = 0.0;
};

/// a_{n+1} = ⌈exp(q_n)⌉.
GrowthRule exp_floor_rule();
/// a_{n+1} = 10^{q_n}.
GrowthRule pow10_floor_rule();
/// a_{n+1} = c for every n. No growth floor; make_liouville rejects it.
GrowthRule constant_rule(long c);

/// Continued fraction |α| = a0 + 1/(a1 + 1/(a2 + …)) with the sign of α kept
/// apart. Partial quotients come from a finite list, a prefix followed by a
/// repeating period, or a prefix followed by a growth rule. Convergents are
/// computed lazily and cached; copies share the cache, which is guarded so
/// concurrent readers are safe.
class ContinuedFraction {
 public:
  enum class Kind { Finite, Periodic, Growth };

  struct Convergent {
    mpz_class p;
    mpz_class q;
  };

  static ContinuedFraction finite(int sign, mpz_class a0, std::vector<mpz_class> quotients);
  static ContinuedFraction periodic(int sign, mpz_class a0, std::vector<mpz_class> prefix,
                                    std::vector<mpz_class> period);
  static ContinuedFraction growth(int sign, mpz_class a0, std::vector<mpz_class> prefix, GrowthRule rule);

  /// (1 + √5)/2 = [1; 1, 1, …].
  static ContinuedFraction golden(int sign = 1);
  /// √2 = [1; 2, 2, …].
  static ContinuedFraction sqrt2(int sign = 1);

  int sign() const { return sign_; }
  const mpz_class& a0() const { return a0_; }
  Kind kind() const { return kind_; }
  ContinuedFraction negated() const;

  /// Number of partial quotients after a0 for finite expansions.
  std::optional<std::size_t> length() const;
  /// Set by cf_expand when float input ran out of precision before the
  /// requested depth (or when a rational expansion was cut short).
  bool truncated() const { return truncated_; }
  const std::string& truncation_note() const { return note_; }

  /// a_n for n ≥ 1; nullopt past the end of a finite expansion or when a
  /// growth rule can no longer be evaluated exactly.
  std::optional<mpz_class> quotient(std::size_t n) const;
  /// p_n/q_n of |α|; nullopt under the same conditions as quotient(n).
  std::optional<Convergent> convergent(std::size_t n) const;
  /// Largest n ≤ limit with a computable convergent.
  std::size_t available_depth(std::size_t limit) const;
  /// First index served by the growth rule (growth kind only).
  std::size_t rule_start() const { return prefix_.size() + 1; }
  const GrowthRule* rule() const { return kind_ == Kind::Growth ? &rule_ : nullptr; }
  std::optional<Rational> rational_value() const;

  /// Signed value at `bits` of precision, from a convergent deep enough for
  /// the error bound 1/(q_n q_{n+1}) to fall below 2^-bits. Throws
  /// DomainError if no available convergent is deep enough.
  BigFloat value(mpfr_prec_t bits) const;

  /// `[a0; a1, a2]`, `[a0; a1, (p1, p2)]` or `[a0; a1, exp-floor…]`, with a
  /// leading `-` for negative values.
  std::string notation() const;

 private:
  struct Cache;

  ContinuedFraction(Kind kind, int sign, mpz_class a0);
  bool ensure(std::size_t n) const;

  Kind kind_;
  int sign_;
  mpz_class a0_;
  std::vector<mpz_class> prefix_;
  std::vector<mpz_class> period_;
  GrowthRule rule_;
  bool truncated_ = false;
  std::string note_;
  std::shared_ptr<Cache> cache_;

  friend ContinuedFraction cf_expand(const Rational& alpha, std::size_t depth);
  friend ContinuedFraction cf_expand(const BigFloat& alpha, std::size_t depth);
};

/// Euclidean expansion of a rational; terminates, or stops at `depth`
/// quotients with truncated() set.
ContinuedFraction cf_expand(const Rational& alpha, std::size_t depth);
/// Expansion of a float value. The float is read as the interval of values
/// within two ulps and quotients are emitted while both ends agree, so every
/// emitted quotient is correct; truncated() is set if that happens before
/// `depth`.
ContinuedFraction cf_expand(const BigFloat& alpha, std::size_t depth);

/// Parses `[a0; a1, a2]`, `[a0; a1, (p1, p2, …)]`, `[a0; a1, a2, ...]` (last
/// quotient repeated), `golden`, `sqrt2`,
/// `exp-floor[:prefix=a1,a2,…]`, `pow10-floor[:…]`, each with an optional
/// leading `-`. Growth rules describe [0; prefix…, rule…].
ContinuedFraction parse_cf(std::string_view text);

}  // namespace nijlin
