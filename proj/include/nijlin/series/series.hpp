#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nijlin/field/field.hpp"

namespace nijlin {

/// Upper bound on the number of variables of a Series.
inline constexpr std::size_t kMaxVars = 8;

using VarList = std::vector<std::string>;

/// Exponent vector of a monomial. Ordered by total degree, then by
/// exponents lexicographically descending, so `x^2 < x*y < y^2 < x^3`.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars);
  Monomial(std::initializer_list<int> exponents);
  explicit Monomial(std::span<const int> exponents);

  /// The monomial `x_index` in `nvars` variables.
  static Monomial unit(std::size_t nvars, std::size_t index);

  std::size_t nvars() const { return nvars_; }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exp_[i]; }
  std::vector<int> exponents() const;

  Monomial with_exponent(std::size_t i, int e) const;
  Monomial operator*(const Monomial& other) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (a.exp_[i] != b.exp_[i]) return a.exp_[i] > b.exp_[i];
    }
    return false;
  }

 private:
  std::array<std::uint16_t, kMaxVars> exp_{};
  std::uint16_t degree_ = 0;
  std::uint8_t nvars_ = 0;
};

/// Truncated multivariate formal power series: every stored term has total
/// degree at most `truncation()` and a nonzero coefficient. Products and
/// substitutions silently discard terms above the truncation order.
template <Coefficient F>
class Series {
 public:
  using Context = typename F::Context;
  using Terms = std::map<Monomial, F>;

  Series(VarList vars, int truncation, Context ctx = {});

  static Series constant(VarList vars, int truncation, const F& c);
  static Series variable(VarList vars, int truncation, std::size_t index, Context ctx = {});
  static Series monomial(VarList vars, int truncation, const Monomial& m, const F& c);

  const VarList& vars() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  int truncation() const { return truncation_; }
  const Context& context() const { return ctx_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  std::size_t var_index(std::string_view name) const;
  F coefficient(const Monomial& m) const;
  F constant_term() const;
  /// Lowest degree carrying a term; `truncation() + 1` for the zero series.
  int valuation() const;
  /// Highest degree carrying a term; -1 for the zero series.
  int max_degree() const;
  bool is_homogeneous(int k) const;

  /// Adds `c * m` in place. Terms above the truncation order and exact
  /// cancellations are dropped, preserving the class invariants.
  void add_term(const Monomial& m, const F& c);

  Series operator-() const;
  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(const Series& o);
  Series scaled(const F& c) const;

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(const Series& a, const Series& b) { return a.multiply(b); }
  friend Series operator*(const F& c, const Series& a) { return a.scaled(c); }

  Series derivative(std::size_t var) const;
  Series derivative(std::string_view name) const { return derivative(var_index(name)); }
  /// Terms of total degree exactly k.
  Series homogeneous_part(int k) const;
  /// Terms of total degree at most k; the truncation order is unchanged.
  Series truncated_to(int k) const;
  /// Same terms, re-declared with a different truncation order.
  Series with_truncation(int truncation) const;
  /// Drops coefficients that are negligible for the field (a no-op for
  /// exact fields).
  Series cleaned() const;

  F evaluate(std::span<const F> point) const;

  /// Throws MismatchError unless variables, truncation and context agree.
  void require_compatible(const Series& o) const;

  friend bool operator==(const Series& a, const Series& b) {
    return a.vars_ == b.vars_ && a.truncation_ == b.truncation_ && a.terms_ == b.terms_;
  }

 private:
  Series multiply(const Series& o) const;

  VarList vars_;
  int truncation_;
  Context ctx_;
  Terms terms_;
};

/// Substitutes `args[i]` for the i-th variable of `f`. Every argument must
/// have zero constant term and all arguments share variables and truncation.
template <Coefficient F>
Series<F> compose(const Series<F>& f, std::span<const Series<F>> args);

/// compose() for several series at once, sharing the power-product cache.
template <Coefficient F>
std::vector<Series<F>> compose_many(std::span<const Series<F>> fs, std::span<const Series<F>> args);

/// Largest coefficient magnitude (as a double) of a series; 0 for zero.
template <Coefficient F>
double max_abs_coefficient(const Series<F>& s);

extern template class Series<Rational>;
extern template class Series<BigFloat>;

}  // namespace nijlin
