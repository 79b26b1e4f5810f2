#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

#include "nijlin/field/rational.hpp"

namespace nijlin {

inline constexpr mpfr_prec_t kDefaultFloatBits = 256;

/// Binary floating-point number with a fixed mantissa width (MPFR, round to
/// nearest). Arithmetic between values of different precision is rejected
/// with MismatchError instead of silently widening or narrowing.
class BigFloat {
 public:
  struct Context {
    mpfr_prec_t bits = kDefaultFloatBits;

    BigFloat make(long n) const { return BigFloat(n, bits); }
    BigFloat make(const Rational& q) const { return BigFloat(q, bits); }
    BigFloat parse(std::string_view text) const { return BigFloat::parse(text, bits); }
    /// Coefficients below 2^(-bits/2) are treated as accumulated round-off.
    BigFloat zero_tolerance() const;
    std::string name() const { return "float:" + std::to_string(bits); }
    friend bool operator==(const Context&, const Context&) = default;
  };

  explicit BigFloat(mpfr_prec_t bits = kDefaultFloatBits);
  BigFloat(long n, mpfr_prec_t bits);
  BigFloat(const Rational& q, mpfr_prec_t bits);
  BigFloat(const mpz_class& n, mpfr_prec_t bits);
  static BigFloat from_double(double x, mpfr_prec_t bits);
  /// Decimal or `p/q` text, correctly rounded to `bits`.
  static BigFloat parse(std::string_view text, mpfr_prec_t bits);
  static BigFloat pi(mpfr_prec_t bits);
  /// 2^e at the given precision.
  static BigFloat power_of_two(long e, mpfr_prec_t bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
  Context context() const { return {precision()}; }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

  BigFloat abs() const;
  BigFloat sqrt() const;
  BigFloat exp() const;
  BigFloat log() const;
  mpz_class floor() const;
  mpz_class ceil() const;

  /// Shortest decimal string that reads back to the same value.
  std::string str() const;

  BigFloat operator-() const;
  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }

  friend bool operator==(const BigFloat& a, const BigFloat& b);
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

 private:
  void require_same_precision(const BigFloat& o) const;

  mpfr_t value_;
};

}  // namespace nijlin
