#include "nijlin/brjuno/continued_fraction.hpp"

#include <cctype>
#include <cmath>
#include <mutex>

#include "nijlin/error.hpp"

namespace nijlin {

namespace {

// Beyond these sizes a partial quotient would not fit comfortably in memory
// (tens of kilobits); the growth rule then only supplies its certified floor.
constexpr long kMaxExpArgument = 45000;
constexpr long kMaxPow10Exponent = 20000;

}  // namespace

GrowthRule exp_floor_rule() {
  GrowthRule r;
  r.name = "exp-floor";
  r.log_floor = 1.0;
  r.next = [](const mpz_class& q) -> std::optional<mpz_class> {
    if (q > kMaxExpArgument) return std::nullopt;
    const long qi = q.get_si();
    const auto bits = static_cast<mpfr_prec_t>(static_cast<double>(qi) * 1.4427 + 96);
    BigFloat x(q, bits);
    return x.exp().ceil();
  };
  return r;
}

GrowthRule pow10_floor_rule() {
  GrowthRule r;
  r.name = "pow10-floor";
  r.log_floor = std::log(10.0);
  r.next = [](const mpz_class& q) -> std::optional<mpz_class> {
    if (q > kMaxPow10Exponent) return std::nullopt;
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 10, q.get_ui());
    return out;
  };
  return r;
}

GrowthRule constant_rule(long c) {
  GrowthRule r;
  r.name = "constant:" + std::to_string(c);
  r.log_floor = 0.0;
  r.next = [c](const mpz_class&) -> std::optional<mpz_class> { return mpz_class(c); };
  return r;
}

struct ContinuedFraction::Cache {
  std::mutex mutex;
  std::vector<mpz_class> quotients;        // a_1, a_2, …
  std::vector<Convergent> convergents;     // index n ↦ (p_n, q_n)
  bool exhausted = false;                  // no further quotient can be produced
};

ContinuedFraction::ContinuedFraction(Kind kind, int sign, mpz_class a0)
    : kind_(kind), sign_(sign >= 0 ? 1 : -1), a0_(std::move(a0)), cache_(std::make_shared<Cache>()) {
  if (a0_ < 0) throw DomainError("integer part of |α| must be nonnegative");
  cache_->convergents.push_back({a0_, 1});
}

ContinuedFraction ContinuedFraction::finite(int sign, mpz_class a0, std::vector<mpz_class> quotients) {
  for (const auto& a : quotients) {
    if (a < 1) throw DomainError("partial quotients must be at least 1");
  }
  ContinuedFraction cf(Kind::Finite, sign, std::move(a0));
  cf.prefix_ = std::move(quotients);
  return cf;
}

ContinuedFraction ContinuedFraction::periodic(int sign, mpz_class a0, std::vector<mpz_class> prefix,
                                              std::vector<mpz_class> period) {
  if (period.empty()) throw DomainError("empty period");
  for (const auto* list : {&prefix, &period}) {
    for (const auto& a : *list) {
      if (a < 1) throw DomainError("partial quotients must be at least 1");
    }
  }
  ContinuedFraction cf(Kind::Periodic, sign, std::move(a0));
  cf.prefix_ = std::move(prefix);
  cf.period_ = std::move(period);
  return cf;
}

ContinuedFraction ContinuedFraction::growth(int sign, mpz_class a0, std::vector<mpz_class> prefix, GrowthRule rule) {
  for (const auto& a : prefix) {
    if (a < 1) throw DomainError("partial quotients must be at least 1");
  }
  ContinuedFraction cf(Kind::Growth, sign, std::move(a0));
  cf.prefix_ = std::move(prefix);
  cf.rule_ = std::move(rule);
  return cf;
}

ContinuedFraction ContinuedFraction::golden(int sign) { return periodic(sign, 1, {}, {1}); }
ContinuedFraction ContinuedFraction::sqrt2(int sign) { return periodic(sign, 1, {}, {2}); }

ContinuedFraction ContinuedFraction::negated() const {
  ContinuedFraction cf = *this;
  cf.sign_ = -sign_;
  return cf;
}

std::optional<std::size_t> ContinuedFraction::length() const {
  if (kind_ == Kind::Finite) return prefix_.size();
  return std::nullopt;
}

bool ContinuedFraction::ensure(std::size_t n) const {
  std::lock_guard lock(cache_->mutex);
  auto& c = *cache_;
  while (c.convergents.size() <= n) {
    if (c.exhausted) return false;
    const std::size_t k = c.convergents.size();  // next index to produce
    std::optional<mpz_class> a;
    if (k <= prefix_.size()) {
      a = prefix_[k - 1];
    } else if (kind_ == Kind::Periodic) {
      a = period_[(k - 1 - prefix_.size()) % period_.size()];
    } else if (kind_ == Kind::Growth) {
      a = rule_.next(c.convergents.back().q);
      if (a && *a < 1) throw DomainError("growth rule produced a partial quotient below 1");
    }
    if (!a) {
      c.exhausted = true;
      return false;
    }
    const Convergent& prev = c.convergents[k - 1];
    const Convergent before = k >= 2 ? c.convergents[k - 2] : Convergent{1, 0};
    c.convergents.push_back({*a * prev.p + before.p, *a * prev.q + before.q});
    c.quotients.push_back(*a);
  }
  return true;
}

std::optional<mpz_class> ContinuedFraction::quotient(std::size_t n) const {
  if (n == 0) return a0_;
  if (!ensure(n)) return std::nullopt;
  std::lock_guard lock(cache_->mutex);
  return cache_->quotients[n - 1];
}

std::optional<ContinuedFraction::Convergent> ContinuedFraction::convergent(std::size_t n) const {
  if (!ensure(n)) return std::nullopt;
  std::lock_guard lock(cache_->mutex);
  return cache_->convergents[n];
}

std::size_t ContinuedFraction::available_depth(std::size_t limit) const {
  ensure(limit);
  std::lock_guard lock(cache_->mutex);
  return std::min(limit, cache_->convergents.size() - 1);
}

std::optional<Rational> ContinuedFraction::rational_value() const {
  if (kind_ != Kind::Finite) return std::nullopt;
  const auto c = convergent(prefix_.size());
  return Rational(sign_ * c->p, c->q);
}

BigFloat ContinuedFraction::value(mpfr_prec_t bits) const {
  const double need = static_cast<double>(bits) + 8.0;  // log2 of 1/error
  if (kind_ == Kind::Finite) return BigFloat(*rational_value(), bits);
  for (std::size_t n = 0; n < 200000; ++n) {
    const auto c = convergent(n);
    if (!c) break;
    const double log2_q = static_cast<double>(mpz_sizeinbase(c->q.get_mpz_t(), 2)) - 1.0;
    double log2_next;
    if (const auto c1 = convergent(n + 1)) {
      log2_next = static_cast<double>(mpz_sizeinbase(c1->q.get_mpz_t(), 2)) - 1.0;
    } else if (kind_ == Kind::Growth && rule_.log_floor > 0 && n + 1 >= rule_start()) {
      // q_{n+1} ≥ a_{n+1} ≥ exp(floor · q_n).
      log2_next = rule_.log_floor * c->q.get_d() / std::log(2.0);
    } else {
      break;
    }
    if (log2_q + log2_next >= need) return BigFloat(Rational(sign_ * c->p, c->q), bits);
  }
  throw DomainError("continued fraction " + notation() + " cannot be evaluated to " + std::to_string(bits) +
                    " bits from its available convergents");
}

std::string ContinuedFraction::notation() const {
  std::string out = (sign_ < 0 ? "-[" : "[") + a0_.get_str();
  std::vector<std::string> items;
  for (const auto& a : prefix_) items.push_back(a.get_str());
  if (kind_ == Kind::Periodic) {
    std::string per = "(";
    for (std::size_t i = 0; i < period_.size(); ++i) per += (i ? ", " : "") + period_[i].get_str();
    items.push_back(per + ")");
  } else if (kind_ == Kind::Growth) {
    items.push_back(rule_.name + "…");
  }
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "; ") + items[i];
  return out + "]";
}

ContinuedFraction cf_expand(const Rational& alpha, std::size_t depth) {
  mpq_class x = abs(alpha.get());
  mpz_class a0;
  mpz_fdiv_q(a0.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  x -= a0;
  std::vector<mpz_class> qs;
  bool cut = false;
  while (x != 0) {
    if (qs.size() >= depth) {
      cut = true;
      break;
    }
    x = 1 / x;
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    qs.push_back(a);
    x -= a;
  }
  auto cf = ContinuedFraction::finite(alpha.sign(), a0, std::move(qs));
  if (cut) {
    cf.truncated_ = true;
    cf.note_ = "depth limit reached before the expansion terminated";
  }
  return cf;
}

namespace {

mpq_class exact_value(const BigFloat& x) {
  mpz_class m;
  const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x.get());
  mpq_class q(m);
  if (e >= 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(e));
    q *= scale;
  } else {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    q /= scale;
  }
  q.canonicalize();
  return q;
}

mpz_class floor_q(const mpq_class& x) {
  mpz_class a;
  mpz_fdiv_q(a.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return a;
}

}  // namespace

ContinuedFraction cf_expand(const BigFloat& alpha, std::size_t depth) {
  if (!alpha.is_finite()) throw DomainError("cannot expand a non-finite value");
  const mpq_class x = abs(exact_value(alpha));
  mpq_class ulp2 = 0;
  if (!alpha.is_zero()) {
    // two units in the last place of |alpha|
    const long e = static_cast<long>(mpfr_get_exp(alpha.get())) - static_cast<long>(alpha.precision()) + 1;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(std::labs(e)));
    ulp2 = e >= 0 ? mpq_class(p) : mpq_class(1, 1) / mpq_class(p);
    ulp2.canonicalize();
  }
  mpq_class lo = x - ulp2;
  mpq_class hi = x + ulp2;
  if (lo < 0) lo = 0;
  std::vector<mpz_class> qs;
  bool exhausted = false;
  mpz_class a0 = floor_q(lo);
  if (floor_q(hi) != a0) {
    exhausted = true;
  } else {
    lo -= a0;
    hi -= a0;
    while (qs.size() < depth) {
      if (lo <= 0) {
        exhausted = true;
        break;
      }
      mpq_class nlo = 1 / hi;
      mpq_class nhi = 1 / lo;
      const mpz_class a = floor_q(nlo);
      if (floor_q(nhi) != a) {
        exhausted = true;
        break;
      }
      qs.push_back(a);
      lo = nlo - a;
      hi = nhi - a;
    }
  }
  auto cf = ContinuedFraction::finite(alpha.sign(), a0, std::move(qs));
  if (exhausted && cf.prefix_.size() < depth) {
    cf.truncated_ = true;
    cf.note_ = "precision exhausted after " + std::to_string(cf.prefix_.size()) + " of " + std::to_string(depth) +
               " requested quotients";
  }
  return cf;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

mpz_class parse_integer(const std::string& text, std::size_t pos) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("missing integer in continued fraction", pos);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) {
      throw ParseError("expected a nonnegative integer, got '" + t + "'", pos + i);
    }
  }
  return mpz_class(t, 10);
}

std::vector<mpz_class> parse_list(const std::string& text, std::size_t pos) {
  std::vector<mpz_class> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    out.push_back(parse_integer(text.substr(start, end - start), pos + start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ContinuedFraction parse_cf(std::string_view text) {
  std::string s = trim(text);
  int sign = 1;
  std::size_t offset = text.find_first_not_of(" \t\n");
  if (offset == std::string_view::npos) offset = 0;
  if (!s.empty() && s[0] == '-') {
    sign = -1;
    s = trim(s.substr(1));
    ++offset;
  }
  if (s.empty()) throw ParseError("empty continued fraction", offset);
  if (s == "golden") return ContinuedFraction::golden(sign);
  if (s == "sqrt2") return ContinuedFraction::sqrt2(sign);
  for (const auto& [name, make] : {std::pair{"exp-floor", &exp_floor_rule}, std::pair{"pow10-floor", &pow10_floor_rule}}) {
    const std::string n = name;
    if (s.rfind(n, 0) != 0) continue;
    std::vector<mpz_class> prefix;
    const std::string rest = s.substr(n.size());
    if (!rest.empty()) {
      const std::string key = ":prefix=";
      if (rest.rfind(key, 0) != 0) throw ParseError("expected ':prefix=' after growth rule name", offset + n.size());
      prefix = parse_list(rest.substr(key.size()), offset + n.size() + key.size());
    }
    return ContinuedFraction::growth(sign, 0, std::move(prefix), make());
  }
  if (s.front() != '[' || s.back() != ']') throw ParseError("continued fraction must look like [a0; a1, …]", offset);
  const std::string body = s.substr(1, s.size() - 2);
  const std::size_t semi = body.find(';');
  const mpz_class a0 = parse_integer(body.substr(0, semi), offset + 1);
  if (semi == std::string::npos) return ContinuedFraction::finite(sign, a0, {});
  std::string tail = body.substr(semi + 1);
  // A trailing `...` repeats the last listed quotient.
  for (const std::string dots : {"...", "…"}) {
    std::string t = trim(tail);
    if (t.size() < dots.size() || t.compare(t.size() - dots.size(), dots.size(), dots) != 0) continue;
    t = trim(t.substr(0, t.size() - dots.size()));
    if (t.empty() || t.back() != ',') throw ParseError("expected ', ...' after at least one quotient", offset + semi + 2);
    t.pop_back();
    auto list = parse_list(t, offset + semi + 2);
    if (list.empty()) throw ParseError("expected ', ...' after at least one quotient", offset + semi + 2);
    std::vector<mpz_class> period{list.back()};
    list.pop_back();
    return ContinuedFraction::periodic(sign, a0, std::move(list), std::move(period));
  }
  const std::size_t open = tail.find('(');
  if (open == std::string::npos) {
    return ContinuedFraction::finite(sign, a0, parse_list(tail, offset + semi + 2));
  }
  const std::size_t close = tail.find(')', open);
  if (close == std::string::npos || !trim(tail.substr(close + 1)).empty()) {
    throw ParseError("period must be a final parenthesised group", offset + semi + 2 + open);
  }
  std::string head = trim(tail.substr(0, open));
  if (!head.empty()) {
    if (head.back() != ',') throw ParseError("expected ',' before the period", offset + semi + 2 + open);
    head.pop_back();
  }
  return ContinuedFraction::periodic(sign, a0, parse_list(head, offset + semi + 2),
                                     parse_list(tail.substr(open + 1, close - open - 1), offset + semi + 3 + open));
}

}  // namespace nijlin
