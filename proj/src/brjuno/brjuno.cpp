#include "nijlin/brjuno/brjuno.hpp"

#include <cctype>
#include <stdexcept>

#include "nijlin/error.hpp"

namespace nijlin {

namespace {

double ratio_log(const mpz_class& num_arg, const mpz_class& den) {
  BigFloat l = BigFloat(num_arg, 160).log();
  return (l / BigFloat(den, 160)).to_double();
}

}  // namespace

std::vector<BrjunoPartialSum> brjuno_partial_sums(const ContinuedFraction& cf, std::size_t n) {
  std::vector<BrjunoPartialSum> out;
  double sum = 0.0;
  bool bounded = false;
  for (std::size_t i = 0; i <= n; ++i) {
    const auto qi = cf.convergent(i);
    const auto qn = cf.convergent(i + 1);
    double term;
    if (qi && qn) {
      term = ratio_log(qn->q, qi->q);
    } else if (const auto* rule = cf.rule(); rule && rule->log_floor > 0 && i + 1 >= cf.rule_start()) {
      // log q_{i+1} ≥ log a_{i+1} ≥ floor · q_i.
      term = rule->log_floor;
      bounded = true;
    } else {
      throw DomainError("Brjuno partial sum S_" + std::to_string(n) + " needs q_" + std::to_string(i + 1) +
                        ", beyond the available expansion of " + cf.notation());
    }
    sum += term;
    out.push_back({i, sum, term, bounded});
  }
  return out;
}

BrjunoPartialSum brjuno_partial_sum(const ContinuedFraction& cf, std::size_t n) {
  return brjuno_partial_sums(cf, n).back();
}

ContinuedFraction make_liouville(const GrowthRule& rule, std::vector<mpz_class> prefix) {
  if (!rule.next) throw DomainError("growth rule has no generator");
  if (rule.log_floor < 1.0) {
    throw DomainError("growth rule '" + rule.name + "' does not guarantee a_{n+1} ≥ exp(q_n)");
  }
  auto cf = ContinuedFraction::growth(1, 0, std::move(prefix), rule);
  // Spot-check the declared floor on the quotients that can be computed.
  for (std::size_t n = cf.rule_start(); n < cf.rule_start() + 4; ++n) {
    const auto prev = cf.convergent(n - 1);
    const auto a = cf.quotient(n);
    if (!prev || !a) break;
    const auto bits = static_cast<mpfr_prec_t>(prev->q.get_d() * 1.4427 + 96);
    if (BigFloat(*a, bits) < BigFloat(prev->q, bits).exp()) {
      throw DomainError("growth rule '" + rule.name + "' falls below exp(q_n) at n = " + std::to_string(n - 1));
    }
  }
  return cf;
}

std::string to_string(Tri t) {
  switch (t) {
    case Tri::No: return "no";
    case Tri::Yes: return "yes";
    case Tri::Unknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(BrjunoDecision d) {
  switch (d) {
    case BrjunoDecision::Brjuno: return "Brjuno";
    case BrjunoDecision::NonBrjuno: return "NonBrjuno";
    case BrjunoDecision::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

int Alpha::sign() const {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ContinuedFraction>) {
          if (v.kind() == ContinuedFraction::Kind::Finite) return v.rational_value()->sign();
          return v.sign();
        } else {
          return v.sign();
        }
      },
      value);
}

BigFloat Alpha::to_float(mpfr_prec_t bits) const {
  if (const auto* q = std::get_if<Rational>(&value)) return BigFloat(*q, bits);
  if (const auto* f = std::get_if<BigFloat>(&value)) {
    BigFloat r(bits);
    mpfr_set(r.get(), f->get(), MPFR_RNDN);
    return r;
  }
  return std::get<ContinuedFraction>(value).value(bits);
}

double Alpha::to_double() const { return to_float(128).to_double(); }

std::string Alpha::describe() const {
  if (const auto* q = std::get_if<Rational>(&value)) return q->str();
  if (const auto* f = std::get_if<BigFloat>(&value)) return f->str();
  return std::get<ContinuedFraction>(value).notation();
}

Alpha parse_alpha(std::string_view text, std::optional<mpfr_prec_t> float_bits) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
  if (s.empty()) throw ParseError("empty α", 0);
  const bool numeric = s.find_first_not_of("+-0123456789./eE") == std::string::npos;
  if (numeric) {
    const bool decimal = s.find_first_of(".eE") != std::string::npos;
    if (decimal && float_bits) return Alpha{BigFloat::parse(s, *float_bits)};
    return Alpha{Rational::parse(s)};
  }
  return Alpha{parse_cf(s)};
}

SigmaFlags sigma_membership(const Rational& a) {
  SigmaFlags f{Tri::No, Tri::No, ""};
  const bool integer_ge3 = a.is_integer() && a >= Rational(3);
  const bool reciprocal = a.sign() > 0 && a.numerator() == 1 && a.denominator() >= 2;
  if (a.sign() < 0) {
    f = {Tri::Yes, Tri::Yes, "negative rational"};
  } else if (a.is_zero()) {
    f = {Tri::Yes, Tri::Yes, "zero"};
  } else if (integer_ge3) {
    f = {Tri::Yes, Tri::Yes, "integer r ≥ 3"};
  } else if (reciprocal) {
    f = {Tri::Yes, Tri::Yes, "1/m with m ≥ 2"};
  } else {
    f.reason = "positive rational, neither an integer ≥ 3 nor 1/m";
  }
  return f;
}

SigmaFlags sigma_membership(const Alpha& alpha) {
  SigmaFlags f;
  if (const auto* q = std::get_if<Rational>(&alpha.value)) {
    f = sigma_membership(*q);
  } else if (const auto* x = std::get_if<BigFloat>(&alpha.value)) {
    if (x->sign() < 0) {
      f = {Tri::Yes, Tri::Unknown, "float α < 0: in Σ_sm; Σ_an needs exact rationality"};
    } else {
      f = {Tri::Unknown, Tri::Unknown, "float α ≥ 0: membership is not decidable without an exact value"};
    }
  } else {
    const auto& cf = std::get<ContinuedFraction>(alpha.value);
    if (cf.kind() == ContinuedFraction::Kind::Finite) {
      f = sigma_membership(*cf.rational_value());
    } else if (cf.sign() < 0) {
      f = {Tri::Yes, Tri::No, "negative irrational (infinite continued fraction)"};
    } else {
      f = {Tri::No, Tri::No, "positive irrational (infinite continued fraction)"};
    }
  }
  if (f.in_sigma_an == Tri::Yes && f.in_sigma_sm != Tri::Yes) {
    throw std::logic_error("Σ_an ⊂ Σ_sm violated for α = " + alpha.describe());
  }
  return f;
}

BrjunoCertificate brjuno_decide(const ContinuedFraction& cf, const BrjunoPolicy& policy) {
  BrjunoCertificate cert{BrjunoDecision::Inconclusive, "", policy.depth, {}, std::nullopt};
  switch (cf.kind()) {
    case ContinuedFraction::Kind::Periodic:
      cert.partial_sums = brjuno_partial_sums(cf, policy.depth);
      cert.decision = BrjunoDecision::Brjuno;
      cert.reason = "eventually periodic partial quotients (quadratic irrational): bounded quotients, q_n grows "
                    "geometrically and the series converges";
      break;
    case ContinuedFraction::Kind::Growth: {
      const auto* rule = cf.rule();
      if (rule->log_floor >= 1.0) {
        cert.decision = BrjunoDecision::NonBrjuno;
        cert.reason = "comparison-test divergence: rule '" + rule->name + "' gives log q_{n+1}/q_n ≥ " +
                      std::to_string(rule->log_floor) + " for every n ≥ " + std::to_string(cf.rule_start() - 1);
        std::size_t n = policy.depth;
        auto sums = brjuno_partial_sums(cf, n);
        while (sums.back().value <= policy.divergence_threshold && n < policy.depth + 100000) {
          n = std::max<std::size_t>(n * 2, 8);
          sums = brjuno_partial_sums(cf, n);
        }
        for (const auto& s : sums) {
          if (s.value > policy.divergence_threshold) {
            cert.threshold_depth = s.n;
            break;
          }
        }
        sums.resize(std::min(sums.size(), std::max(policy.depth + 1, cert.threshold_depth.value_or(0) + 1)));
        cert.partial_sums = std::move(sums);
      } else {
        cert.reason = "growth rule '" + rule->name + "' carries no certified floor";
        const std::size_t avail = cf.available_depth(policy.depth + 1);
        if (avail >= 1) cert.partial_sums = brjuno_partial_sums(cf, std::min(policy.depth, avail - 1));
      }
      break;
    }
    case ContinuedFraction::Kind::Finite: {
      const std::size_t len = *cf.length();
      if (len >= 1) cert.partial_sums = brjuno_partial_sums(cf, std::min(policy.depth, len - 1));
      cert.depth = cert.partial_sums.size();
      if (cf.truncated()) {
        cert.reason = "finite data cannot certify a limit property (" + cf.truncation_note() + ")";
      } else if (len < policy.depth) {
        cert.reason = "finite expansion: α is rational and the Brjuno condition concerns irrationals";
      } else {
        cert.reason = "finite data cannot certify a limit property (depth exhausted)";
      }
      break;
    }
  }
  return cert;
}

}  // namespace nijlin
