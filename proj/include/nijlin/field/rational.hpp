#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace nijlin {

/// Exact arbitrary-precision rational number, always kept in canonical form.
class Rational {
 public:
  /// Rationals carry no precision, so every context is interchangeable.
  struct Context {
    Rational make(long n) const { return Rational(n); }
    Rational make(const Rational& q) const { return q; }
    Rational parse(std::string_view text) const { return Rational::parse(text); }
    /// Exact arithmetic: zero means zero.
    Rational zero_tolerance() const { return Rational(); }
    std::string name() const { return "rational"; }
    friend bool operator==(const Context&, const Context&) = default;
  };

  Rational() = default;
  Rational(long n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(mpq_class q);

  /// Accepts `p/q`, integers and decimal literals such as `-1.25e-3`
  /// (decimals are converted exactly).
  static Rational parse(std::string_view text);

  Context context() const { return {}; }

  const mpq_class& get() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  bool is_integer() const { return value_.get_den() == 1; }

  bool is_zero() const { return sgn(value_) == 0; }
  int sign() const { return sgn(value_); }
  Rational abs() const { return Rational(mpq_class(::abs(value_))); }
  double to_double() const { return value_.get_d(); }

  /// `p` or `p/q` with a leading minus sign when negative.
  std::string str() const;

  Rational operator-() const { return Rational(mpq_class(-value_)); }
  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class value_;
};

/// Exact square root when `q` is the square of a rational; nothing otherwise.
bool rational_sqrt(const Rational& q, Rational& root);

}  // namespace nijlin
