#include "nijlin/series/io.hpp"

#include <cctype>

#include "nijlin/error.hpp"

namespace nijlin {

namespace {

template <Coefficient F>
class SeriesParser {
 public:
  SeriesParser(std::string_view text, const VarList& vars, int truncation, typename F::Context ctx)
      : text_(text), vars_(vars), truncation_(truncation), ctx_(std::move(ctx)) {}

  Series<F> run() {
    Series<F> out(vars_, truncation_, ctx_);
    skip_space();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    bool negative = false;
    if (peek() == '+' || peek() == '-') {
      negative = peek() == '-';
      ++pos_;
    }
    for (;;) {
      auto [m, c] = term();
      out.add_term(m, negative ? -c : c);
      skip_space();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') throw ParseError("expected '+' or '-'", pos_);
      negative = peek() == '-';
      ++pos_;
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool digit_at(std::size_t p) const {
    return p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]));
  }

  std::pair<Monomial, F> term() {
    Monomial m(vars_.size());
    F c = ctx_.make(1L);
    for (;;) {
      skip_space();
      if (at_end()) throw ParseError("unexpected end of polynomial", pos_);
      const char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        c *= number();
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        const std::size_t start = pos_;
        const std::string name = identifier();
        std::size_t idx = vars_.size();
        for (std::size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == name) idx = i;
        }
        if (idx == vars_.size()) throw ParseError("unknown variable '" + name + "'", start);
        int e = 1;
        skip_space();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip_space();
          if (!digit_at(pos_)) throw ParseError("expected exponent after '^'", pos_);
          const std::size_t es = pos_;
          while (digit_at(pos_)) ++pos_;
          if (pos_ - es > 4) throw ParseError("exponent too large", es);
          e = std::stoi(std::string(text_.substr(es, pos_ - es)));
        }
        m = m.with_exponent(idx, m[idx] + e);
      } else {
        throw ParseError(std::string("unexpected character '") + ch + "'", pos_);
      }
      skip_space();
      if (at_end() || peek() != '*') break;
      ++pos_;
    }
    return {m, c};
  }

  F number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (digit_at(p)) {
        pos_ = p;
        while (digit_at(pos_)) ++pos_;
      }
    }
    if (!at_end() && peek() == '/' && digit_at(pos_ + 1)) {
      ++pos_;
      while (digit_at(pos_)) ++pos_;
    }
    try {
      return ctx_.parse(text_.substr(start, pos_ - start));
    } catch (const ParseError& e) {
      throw ParseError("malformed coefficient '" + std::string(text_.substr(start, pos_ - start)) + "'",
                       start);
    }
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  const VarList& vars_;
  int truncation_;
  typename F::Context ctx_;
  std::size_t pos_ = 0;
};

std::string monomial_text(const Monomial& m, const VarList& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += vars[i];
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out;
}

}  // namespace

template <Coefficient F>
Series<F> parse_series(std::string_view text, const VarList& vars, int truncation, typename F::Context ctx) {
  return SeriesParser<F>(text, vars, truncation, std::move(ctx)).run();
}

template <Coefficient F>
std::string format_series(const Series<F>& s) {
  if (s.is_zero()) return "0";
  const F one = s.context().make(1L);
  std::string out;
  for (const auto& [m, c] : s.terms()) {
    const bool negative = c.sign() < 0;
    const F mag = c.abs();
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    const std::string mono = monomial_text(m, s.vars());
    if (mono.empty()) {
      out += mag.str();
    } else if (mag == one) {
      out += mono;
    } else {
      out += mag.str() + "*" + mono;
    }
  }
  return out;
}

template <Coefficient F>
Json series_to_json(const Series<F>& s) {
  Json terms = Json::array();
  for (const auto& [m, c] : s.terms()) {
    terms.push_back(Json{{"exp", m.exponents()}, {"coef", c.str()}});
  }
  return Json{{"vars", s.vars()}, {"truncation", s.truncation()}, {"terms", std::move(terms)}};
}

template <Coefficient F>
F coefficient_from_json(const Json& j, const typename F::Context& ctx) {
  if (j.is_string()) return ctx.parse(j.get<std::string>());
  if (j.is_number_integer()) return ctx.make(j.get<long>());
  if (j.is_number()) return ctx.parse(j.dump());
  throw ParseError("coefficient must be a string or a number", 0);
}

template <Coefficient F>
Series<F> series_from_json(const Json& j, const VarList& vars, int truncation, typename F::Context ctx) {
  if (j.is_string()) return parse_series<F>(j.get<std::string>(), vars, truncation, ctx);
  if (j.is_number()) return Series<F>::constant(vars, truncation, coefficient_from_json<F>(j, ctx));
  if (!j.is_object() || !j.contains("terms")) throw ParseError("series must be a string or an object with terms", 0);
  Series<F> out(vars, truncation, ctx);
  for (const auto& t : j.at("terms")) {
    const auto exps = t.at("exp").get<std::vector<int>>();
    if (exps.size() != vars.size()) throw ParseError("exponent vector has the wrong length", 0);
    out.add_term(Monomial(std::span<const int>(exps)), coefficient_from_json<F>(t.at("coef"), ctx));
  }
  return out;
}

template <Coefficient F>
Series<F> series_from_json(const Json& j, typename F::Context ctx) {
  if (!j.is_object()) throw ParseError("series object expected", 0);
  try {
    const auto vars = j.at("vars").get<VarList>();
    const int n = j.at("truncation").get<int>();
    return series_from_json<F>(j, vars, n, std::move(ctx));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad series object: ") + e.what(), 0);
  }
}

#define NIJLIN_INSTANTIATE(F)                                                                        \
  template Series<F> parse_series<F>(std::string_view, const VarList&, int, F::Context);             \
  template std::string format_series<F>(const Series<F>&);                                           \
  template Json series_to_json<F>(const Series<F>&);                                                 \
  template Series<F> series_from_json<F>(const Json&, F::Context);                                   \
  template Series<F> series_from_json<F>(const Json&, const VarList&, int, F::Context);              \
  template F coefficient_from_json<F>(const Json&, const F::Context&);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
