#include "nijlin/field/bigfloat.hpp"

#include <cctype>
#include <cstdlib>
#include <utility>

#include "nijlin/error.hpp"

namespace nijlin {

BigFloat::BigFloat(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) throw DomainError("invalid float precision");
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(long n, mpfr_prec_t bits) : BigFloat(bits) { mpfr_set_si(value_, n, MPFR_RNDN); }

BigFloat::BigFloat(const Rational& q, mpfr_prec_t bits) : BigFloat(bits) {
  mpfr_set_q(value_, q.get().get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const mpz_class& n, mpfr_prec_t bits) : BigFloat(bits) {
  mpfr_set_z(value_, n.get_mpz_t(), MPFR_RNDN);
}

BigFloat BigFloat::from_double(double x, mpfr_prec_t bits) {
  BigFloat r(bits);
  mpfr_set_d(r.value_, x, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::parse(std::string_view text, mpfr_prec_t bits) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw ParseError("empty number", 0);
  if (s.find('/') != std::string::npos) return BigFloat(Rational::parse(s), bits);
  BigFloat r(bits);
  char* end = nullptr;
  mpfr_strtofr(r.value_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError("malformed float '" + s + "'", static_cast<std::size_t>(end - s.c_str()));
  }
  return r;
}

BigFloat BigFloat::pi(mpfr_prec_t bits) {
  BigFloat r(bits);
  mpfr_const_pi(r.value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::power_of_two(long e, mpfr_prec_t bits) {
  BigFloat r(1, bits);
  mpfr_mul_2si(r.value_, r.value_, e, MPFR_RNDN);
  return r;
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, other.precision());
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::Context::zero_tolerance() const { return power_of_two(-(bits / 2), bits); }

void BigFloat::require_same_precision(const BigFloat& o) const {
  if (precision() != o.precision()) {
    throw MismatchError("mixed-precision float arithmetic (" + std::to_string(precision()) +
                        " vs " + std::to_string(o.precision()) + " bits)");
  }
}

BigFloat BigFloat::abs() const {
  BigFloat r(precision());
  mpfr_abs(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::sqrt() const {
  if (sign() < 0) throw DomainError("square root of a negative number");
  BigFloat r(precision());
  mpfr_sqrt(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::exp() const {
  BigFloat r(precision());
  mpfr_exp(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::log() const {
  if (sign() <= 0) throw DomainError("logarithm of a non-positive number");
  BigFloat r(precision());
  mpfr_log(r.value_, value_, MPFR_RNDN);
  return r;
}

mpz_class BigFloat::floor() const {
  if (!is_finite()) throw DomainError("floor of a non-finite value");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), value_, MPFR_RNDD);
  return z;
}

mpz_class BigFloat::ceil() const {
  if (!is_finite()) throw DomainError("ceil of a non-finite value");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), value_, MPFR_RNDU);
  return z;
}

std::string BigFloat::str() const {
  if (is_zero()) return "0";
  if (!is_finite()) return mpfr_nan_p(value_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, 0, value_, MPFR_RNDN);
  std::string digits(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (!digits.empty() && digits[0] == '-') {
    sign = "-";
    digits.erase(0, 1);
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  // value = 0.d1d2d3... * 10^exp10
  std::string out = sign + digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  const long e = static_cast<long>(exp10) - 1;
  if (e != 0) out += "e" + std::to_string(e);
  return out;
}

BigFloat BigFloat::operator-() const {
  BigFloat r(precision());
  mpfr_neg(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  require_same_precision(o);
  mpfr_add(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& o) {
  require_same_precision(o);
  mpfr_sub(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& o) {
  require_same_precision(o);
  mpfr_mul(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& o) {
  require_same_precision(o);
  if (o.is_zero()) throw DomainError("division by zero");
  mpfr_div(value_, value_, o.value_, MPFR_RNDN);
  return *this;
}

bool operator==(const BigFloat& a, const BigFloat& b) {
  a.require_same_precision(b);
  return mpfr_equal_p(a.value_, b.value_) != 0;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  a.require_same_precision(b);
  if (mpfr_unordered_p(a.value_, b.value_) != 0) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

}  // namespace nijlin
