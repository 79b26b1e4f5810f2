#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "../support/random.hpp"
#include "nijlin/brjuno/brjuno.hpp"
#include "nijlin/error.hpp"

using namespace nijlin;
using nijlin::testing::Rng;

namespace {

std::vector<long> quotients(const ContinuedFraction& cf, std::size_t n) {
  std::vector<long> out;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto a = cf.quotient(i);
    if (!a) break;
    out.push_back(a->get_si());
  }
  return out;
}

void check_recurrences(const ContinuedFraction& cf, std::size_t depth) {
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto c = cf.convergent(n);
    if (!c) break;
    const mpz_class a = *cf.quotient(n);
    if (n >= 1) {
      const auto before = cf.convergent(n - 1);
      const mpz_class pm2 = n >= 2 ? cf.convergent(n - 2)->p : mpz_class(1);
      const mpz_class qm2 = n >= 2 ? cf.convergent(n - 2)->q : mpz_class(0);
      CHECK(c->p == a * before->p + pm2);
      CHECK(c->q == a * before->q + qm2);
      const mpz_class det = c->p * before->q - before->p * c->q;
      CHECK(det == ((n % 2 == 0) ? -1 : 1));  // (-1)^{n-1}
      if (n >= 2) CHECK(c->q > before->q);
    }
  }
}

}  // namespace

TEST_CASE("expansion examples") {
  const auto seven_thirds = cf_expand(Rational::parse("7/3"), 10);
  CHECK(seven_thirds.a0() == 2);
  CHECK(quotients(seven_thirds, 10) == std::vector<long>{3});
  CHECK(seven_thirds.notation() == "[2; 3]");
  CHECK(*seven_thirds.rational_value() == Rational::parse("7/3"));

  const auto g = ContinuedFraction::golden();
  mpz_class f0 = 1, f1 = 1;
  for (std::size_t n = 1; n <= 60; ++n) {
    CHECK(g.convergent(n)->q == f1);
    const mpz_class f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
  }

  const auto root2 = cf_expand(BigFloat(2, 256).sqrt(), 60);
  CHECK_FALSE(root2.truncated());
  CHECK(root2.a0() == 1);
  CHECK(quotients(root2, 60) == std::vector<long>(60, 2));
  const auto deep = cf_expand(BigFloat(2, 256).sqrt(), 500);
  CHECK(deep.truncated());
  CHECK(*deep.length() > 80);
  CHECK(*deep.length() < 110);
  for (long a : quotients(deep, 500)) CHECK(a == 2);
}

TEST_CASE("rational reconstruction and truncation") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const Rational q(mpz_class(rng.uniform(-100000, 100000)), mpz_class(rng.uniform(1, 100000)));
    const auto cf = cf_expand(q, 1000);
    CHECK_FALSE(cf.truncated());
    CHECK(*cf.rational_value() == q);
    check_recurrences(cf, 1000);
  }
  CHECK(cf_expand(Rational::parse("355/113"), 1).truncated());
}

TEST_CASE("convergent recurrences and determinant identity to depth 500") {
  check_recurrences(ContinuedFraction::golden(), 500);
  check_recurrences(ContinuedFraction::sqrt2(), 500);
  check_recurrences(parse_cf("[3; 7, 15, (1, 292)]"), 500);
  CHECK(ContinuedFraction::golden().convergent(500).has_value());
}

TEST_CASE("Brjuno partial sums") {
  const auto g = ContinuedFraction::golden();
  const auto sums = brjuno_partial_sums(g, 60);
  CHECK(sums[0].value == 0.0);  // log q_1 / q_0 = log 1
  for (std::size_t i = 1; i < sums.size(); ++i) CHECK(sums[i].value >= sums[i - 1].value);
  CHECK(sums[1].value == doctest::Approx(std::log(2.0)));

  // Quotients ≤ 2 give q_{n+1} ≤ 3 q_n, so every term is at most log(3 q_n)/q_n.
  const auto cf = parse_cf("[0; 1, 2, 2, 1, (2, 1, 1)]");
  const auto s = brjuno_partial_sums(cf, 80);
  for (std::size_t n = 0; n <= 80; ++n) {
    const double qn = cf.convergent(n)->q.get_d();
    CHECK(s[n].term <= std::log(3.0 * qn) / qn + 1e-15);
  }

  CHECK_THROWS_AS(brjuno_partial_sums(cf_expand(Rational::parse("7/3"), 10), 1), DomainError);
}

TEST_CASE("Liouville-type expansions") {
  const auto liou = make_liouville(exp_floor_rule());
  CHECK(liou.quotient(1) == mpz_class(3));   // ⌈e⌉
  CHECK(liou.quotient(2) == mpz_class(21));  // ⌈e^3⌉
  const auto sums = brjuno_partial_sums(liou, 20);
  for (std::size_t i = 0; i < sums.size(); ++i) CHECK(sums[i].term >= 1.0);
  CHECK(sums.back().lower_bound);
  CHECK(sums.back().value > 10.0);

  const auto p10 = make_liouville(pow10_floor_rule());
  const auto s10 = brjuno_partial_sums(p10, 12);
  for (const auto& s : s10) CHECK(s.term >= std::log(10.0) - 1e-12);

  CHECK_THROWS_AS(make_liouville(constant_rule(1)), DomainError);
  GrowthRule liar = constant_rule(2);
  liar.log_floor = 1.0;  // claims a floor it does not have
  CHECK_THROWS_AS(make_liouville(liar), DomainError);
}

TEST_CASE("sigma membership examples") {
  auto flags = [](std::string_view s) { return sigma_membership(parse_alpha(s)); };
  CHECK(flags("-2/3").in_sigma_an == Tri::Yes);
  CHECK(flags("-2/3").in_sigma_sm == Tri::Yes);
  CHECK(flags("3").in_sigma_an == Tri::Yes);
  CHECK(flags("2").in_sigma_an == Tri::No);
  CHECK(flags("2").in_sigma_sm == Tri::No);
  CHECK(flags("1/2").in_sigma_an == Tri::Yes);
  CHECK(flags("2/5").in_sigma_sm == Tri::No);
  CHECK(flags("0").in_sigma_an == Tri::Yes);
  CHECK(flags("golden").in_sigma_sm == Tri::No);
  CHECK(flags("-golden").in_sigma_sm == Tri::Yes);
  CHECK(flags("-golden").in_sigma_an == Tri::No);
  CHECK(sigma_membership(parse_alpha("-0.7", 256)).in_sigma_sm == Tri::Yes);
  CHECK(sigma_membership(parse_alpha("-0.7", 256)).in_sigma_an == Tri::Unknown);
  CHECK(sigma_membership(parse_alpha("3.0", 256)).in_sigma_sm == Tri::Unknown);
}

TEST_CASE("Brjuno decisions") {
  CHECK(brjuno_decide(ContinuedFraction::golden()).decision == BrjunoDecision::Brjuno);
  const auto liou = brjuno_decide(make_liouville(exp_floor_rule()));
  CHECK(liou.decision == BrjunoDecision::NonBrjuno);
  REQUIRE(liou.threshold_depth.has_value());
  CHECK(liou.partial_sums[*liou.threshold_depth].value > 10.0);
  const auto fl = brjuno_decide(cf_expand(BigFloat(2, 256).sqrt(), 200), {200, 10.0});
  CHECK(fl.decision == BrjunoDecision::Inconclusive);
  CHECK_FALSE(fl.partial_sums.empty());
}

TEST_CASE("continued fraction notation") {
  CHECK(parse_cf("[1; 2, (3, 4)]").notation() == "[1; 2, (3, 4)]");
  CHECK(parse_cf("-golden").notation() == "-[1; (1)]");
  CHECK(parse_cf("exp-floor:prefix=70").notation() == "[0; 70, exp-floor…]");
  CHECK(parse_cf("[5]").notation() == "[5]");
  CHECK(parse_cf("[1;1,1,...]").notation() == "[1; 1, (1)]");
  CHECK(parse_cf("[1; 2, 2, …]").notation() == "[1; 2, (2)]");
  CHECK_THROWS_AS(parse_cf("[1; ...]"), ParseError);
  CHECK_THROWS_AS(parse_cf("[1; 0, 2]"), DomainError);
  CHECK_THROWS_AS(parse_cf("[1; x]"), ParseError);
  CHECK_THROWS_AS(parse_cf("1; 2"), ParseError);
}

TEST_CASE("values at precision") {
  const BigFloat phi = ContinuedFraction::golden().value(256);
  const BigFloat expect = (BigFloat(5, 256).sqrt() + BigFloat(1, 256)) / BigFloat(2, 256);
  CHECK(((phi - expect).abs() < BigFloat::power_of_two(-250, 256)));
  const BigFloat liou = parse_cf("-exp-floor:prefix=70").value(256);
  CHECK(liou.to_double() == doctest::Approx(-1.0 / 70.0));
}

TEST_CASE("convergent cache under concurrent readers") {
  const auto cf = ContinuedFraction::sqrt2();
  std::vector<std::thread> pool;
  std::vector<mpz_class> seen(4);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&cf, &seen, t] {
      for (std::size_t n = 0; n < 300; ++n) seen[t] = cf.convergent(n)->q;
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& q : seen) CHECK(q == seen[0]);
}
