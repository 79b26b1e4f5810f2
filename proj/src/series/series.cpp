#include "nijlin/series/series.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nijlin/error.hpp"

namespace nijlin {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::size_t nvars) {
  if (nvars > kMaxVars) throw DomainError("too many variables (limit " + std::to_string(kMaxVars) + ")");
  nvars_ = static_cast<std::uint8_t>(nvars);
}

Monomial::Monomial(std::initializer_list<int> exponents)
    : Monomial(std::span<const int>(exponents.begin(), exponents.size())) {}

Monomial::Monomial(std::span<const int> exponents) : Monomial(exponents.size()) {
  int total = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > 0xFFFF) throw DomainError("exponent out of range");
    exp_[i] = static_cast<std::uint16_t>(exponents[i]);
    total += exponents[i];
  }
  if (total > 0xFFFF) throw DomainError("total degree out of range");
  degree_ = static_cast<std::uint16_t>(total);
}

Monomial Monomial::unit(std::size_t nvars, std::size_t index) {
  Monomial m(nvars);
  m.exp_[index] = 1;
  m.degree_ = 1;
  return m;
}

std::vector<int> Monomial::exponents() const {
  return std::vector<int>(exp_.begin(), exp_.begin() + nvars_);
}

Monomial Monomial::with_exponent(std::size_t i, int e) const {
  Monomial m = *this;
  m.degree_ = static_cast<std::uint16_t>(m.degree_ - m.exp_[i] + e);
  m.exp_[i] = static_cast<std::uint16_t>(e);
  return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial m = *this;
  for (std::size_t i = 0; i < kMaxVars; ++i) m.exp_[i] = static_cast<std::uint16_t>(m.exp_[i] + other.exp_[i]);
  m.degree_ = static_cast<std::uint16_t>(m.degree_ + other.degree_);
  m.nvars_ = std::max(nvars_, other.nvars_);
  return m;
}

// ------------------------------------------------------------------ Series

template <Coefficient F>
Series<F>::Series(VarList vars, int truncation, Context ctx)
    : vars_(std::move(vars)), truncation_(truncation), ctx_(std::move(ctx)) {
  if (vars_.size() > kMaxVars) throw DomainError("too many variables (limit " + std::to_string(kMaxVars) + ")");
  if (truncation_ < 0) throw DomainError("negative truncation order");
}

template <Coefficient F>
Series<F> Series<F>::constant(VarList vars, int truncation, const F& c) {
  Series s(std::move(vars), truncation, c.context());
  s.add_term(Monomial(s.nvars()), c);
  return s;
}

template <Coefficient F>
Series<F> Series<F>::variable(VarList vars, int truncation, std::size_t index, Context ctx) {
  Series s(std::move(vars), truncation, ctx);
  if (index >= s.nvars()) throw DomainError("variable index out of range");
  s.add_term(Monomial::unit(s.nvars(), index), ctx.make(1L));
  return s;
}

template <Coefficient F>
Series<F> Series<F>::monomial(VarList vars, int truncation, const Monomial& m, const F& c) {
  Series s(std::move(vars), truncation, c.context());
  if (m.nvars() != s.nvars()) throw MismatchError("monomial arity does not match variables");
  s.add_term(m, c);
  return s;
}

template <Coefficient F>
std::size_t Series<F>::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == name) return i;
  }
  throw DomainError("unknown variable '" + std::string(name) + "'");
}

template <Coefficient F>
F Series<F>::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? ctx_.make(0L) : it->second;
}

template <Coefficient F>
F Series<F>::constant_term() const {
  return coefficient(Monomial(nvars()));
}

template <Coefficient F>
int Series<F>::valuation() const {
  return terms_.empty() ? truncation_ + 1 : terms_.begin()->first.degree();
}

template <Coefficient F>
int Series<F>::max_degree() const {
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

template <Coefficient F>
bool Series<F>::is_homogeneous(int k) const {
  return std::all_of(terms_.begin(), terms_.end(), [k](const auto& t) { return t.first.degree() == k; });
}

template <Coefficient F>
void Series<F>::add_term(const Monomial& m, const F& c) {
  if (m.nvars() != nvars()) throw MismatchError("monomial arity does not match variables");
  if (m.degree() > truncation_ || c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

template <Coefficient F>
void Series<F>::require_compatible(const Series& o) const {
  if (vars_ != o.vars_) throw MismatchError("series have different variables");
  if (truncation_ != o.truncation_) {
    throw MismatchError("series have different truncation orders (" + std::to_string(truncation_) + " vs " +
                        std::to_string(o.truncation_) + ")");
  }
  if (!(ctx_ == o.ctx_)) throw MismatchError("series have different coefficient contexts");
}

template <Coefficient F>
Series<F> Series<F>::operator-() const {
  Series r(vars_, truncation_, ctx_);
  for (const auto& [m, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), m, -c);
  return r;
}

template <Coefficient F>
Series<F>& Series<F>::operator+=(const Series& o) {
  require_compatible(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

template <Coefficient F>
Series<F>& Series<F>::operator-=(const Series& o) {
  require_compatible(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

template <Coefficient F>
Series<F>& Series<F>::operator*=(const Series& o) {
  *this = multiply(o);
  return *this;
}

template <Coefficient F>
Series<F> Series<F>::multiply(const Series& o) const {
  require_compatible(o);
  Series r(vars_, truncation_, ctx_);
  for (const auto& [ma, ca] : terms_) {
    const int room = truncation_ - ma.degree();
    if (room < 0) break;
    for (const auto& [mb, cb] : o.terms_) {
      if (mb.degree() > room) break;
      auto [it, inserted] = r.terms_.try_emplace(ma * mb, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  std::erase_if(r.terms_, [](const auto& t) { return t.second.is_zero(); });
  return r;
}

template <Coefficient F>
Series<F> Series<F>::scaled(const F& c) const {
  Series r(vars_, truncation_, ctx_);
  if (c.is_zero()) return r;
  for (const auto& [m, v] : terms_) r.add_term(m, v * c);
  return r;
}

template <Coefficient F>
Series<F> Series<F>::derivative(std::size_t var) const {
  if (var >= nvars()) throw DomainError("derivative with respect to an unknown variable");
  Series r(vars_, truncation_, ctx_);
  for (const auto& [m, c] : terms_) {
    const int e = m[var];
    if (e == 0) continue;
    r.add_term(m.with_exponent(var, e - 1), c * ctx_.make(static_cast<long>(e)));
  }
  return r;
}

template <Coefficient F>
Series<F> Series<F>::homogeneous_part(int k) const {
  if (k < 0 || k > truncation_) {
    throw DomainError("homogeneous degree " + std::to_string(k) + " outside 0.." + std::to_string(truncation_));
  }
  Series r(vars_, truncation_, ctx_);
  for (const auto& [m, c] : terms_) {
    if (m.degree() == k) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

template <Coefficient F>
Series<F> Series<F>::truncated_to(int k) const {
  Series r(vars_, truncation_, ctx_);
  for (const auto& [m, c] : terms_) {
    if (m.degree() > k) break;
    r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

template <Coefficient F>
Series<F> Series<F>::with_truncation(int truncation) const {
  Series r(vars_, truncation, ctx_);
  for (const auto& [m, c] : terms_) {
    if (m.degree() > truncation) break;
    r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

template <Coefficient F>
Series<F> Series<F>::cleaned() const {
  if constexpr (is_exact_field<F>) {
    return *this;
  } else {
    Series r(vars_, truncation_, ctx_);
    for (const auto& [m, c] : terms_) {
      if (!negligible(c)) r.terms_.emplace_hint(r.terms_.end(), m, c);
    }
    return r;
  }
}

template <Coefficient F>
F Series<F>::evaluate(std::span<const F> point) const {
  if (point.size() != nvars()) throw MismatchError("evaluation point has the wrong dimension");
  F total = ctx_.make(0L);
  for (const auto& [m, c] : terms_) {
    F term = c;
    for (std::size_t i = 0; i < nvars(); ++i) {
      for (int e = 0; e < m[i]; ++e) term *= point[i];
    }
    total += term;
  }
  return total;
}

// ------------------------------------------------------------- composition

namespace {

template <Coefficient F>
class PowerProducts {
 public:
  explicit PowerProducts(std::span<const Series<F>> args) : args_(args) {}

  // Product of args[i]^e[i] over i, memoised on the exponent vector.
  const Series<F>& get(const Monomial& e) {
    if (auto it = cache_.find(e); it != cache_.end()) return it->second;
    const Series<F>& first = args_[0];
    if (e.degree() == 0) {
      return cache_.emplace(e, Series<F>::constant(first.vars(), first.truncation(), first.context().make(1L)))
          .first->second;
    }
    std::size_t j = 0;
    while (e[j] == 0) ++j;
    const Monomial lower = e.with_exponent(j, e[j] - 1);
    Series<F> value = (lower.degree() == 0) ? args_[j] : get(lower) * args_[j];
    return cache_.emplace(e, std::move(value)).first->second;
  }

 private:
  std::span<const Series<F>> args_;
  std::map<Monomial, Series<F>> cache_;
};

template <Coefficient F>
void check_compose_args(std::size_t nvars, std::span<const Series<F>> args) {
  if (args.size() != nvars) throw MismatchError("compose needs one argument per variable");
  if (args.empty()) throw MismatchError("compose needs at least one argument");
  for (const auto& a : args) {
    a.require_compatible(args[0]);
    if (!a.constant_term().is_zero()) throw DomainError("compose argument has a nonzero constant term");
  }
}

}  // namespace

template <Coefficient F>
std::vector<Series<F>> compose_many(std::span<const Series<F>> fs, std::span<const Series<F>> args) {
  std::vector<Series<F>> out;
  if (fs.empty()) return out;
  check_compose_args(fs[0].nvars(), args);
  const int n = args[0].truncation();
  PowerProducts<F> powers(args);
  for (const auto& f : fs) {
    check_compose_args(f.nvars(), args);
    if (f.truncation() != n) throw MismatchError("compose: truncation of f differs from its arguments");
    Series<F> r(args[0].vars(), n, args[0].context());
    for (const auto& [m, c] : f.terms()) {
      if (m.degree() > n) break;
      r += powers.get(m).scaled(c);
    }
    out.push_back(std::move(r));
  }
  return out;
}

template <Coefficient F>
Series<F> compose(const Series<F>& f, std::span<const Series<F>> args) {
  return std::move(compose_many<F>(std::span<const Series<F>>(&f, 1), args).front());
}

template <Coefficient F>
double max_abs_coefficient(const Series<F>& s) {
  double best = 0.0;
  for (const auto& [m, c] : s.terms()) best = std::max(best, std::abs(c.to_double()));
  return best;
}

template class Series<Rational>;
template class Series<BigFloat>;

#define NIJLIN_INSTANTIATE(F)                                                                  \
  template Series<F> compose<F>(const Series<F>&, std::span<const Series<F>>);                 \
  template std::vector<Series<F>> compose_many<F>(std::span<const Series<F>>,                  \
                                                  std::span<const Series<F>>);                 \
  template double max_abs_coefficient<F>(const Series<F>&);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
