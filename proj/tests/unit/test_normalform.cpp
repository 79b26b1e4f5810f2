#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "../support/random.hpp"
#include "nijlin/brjuno/brjuno.hpp"
#include "nijlin/error.hpp"
#include "nijlin/normalform/normalform.hpp"
#include "nijlin/series/io.hpp"

using namespace nijlin;
using nijlin::testing::Rng;

namespace {

const VarList kUV = {"u", "v"};
const VarList kLM = {"l", "m"};
using S = Series<Rational>;
using Op = OperatorField<Rational>;

Rational Q(long p, long q = 1) { return Rational(mpz_class(p), mpz_class(q)); }

S P(std::string_view text, int n) { return parse_series<Rational>(text, kUV, n); }

S mono_term(int i, int j, const Rational& c, int n) { return S::monomial(kUV, n, Monomial{i, j}, c); }

S u_(int n) { return S::variable(kUV, n, 0); }
S v_(int n) { return S::variable(kUV, n, 1); }

/// λ₀·Id + [[0, u], [0, αv]] + [[a, b], [c, d]].
Op template_plus(const Rational& alpha, const Rational& lambda0, const S& a, const S& b, const S& c, const S& d) {
  const int n = a.truncation();
  const S l = S::constant(kUV, n, lambda0);
  return Op({{l + a, u_(n) + b}, {c, l + v_(n).scaled(alpha) + d}});
}

template <Coefficient G>
Series<G> lift(const S& s, const typename G::Context& ctx) {
  Series<G> out(s.vars(), s.truncation(), ctx);
  for (const auto& [m, c] : s.terms()) out.add_term(m, ctx.make(c));
  return out;
}

template <Coefficient G>
OperatorField<G> lift(const Op& R, const typename G::Context& ctx) {
  std::vector<std::vector<Series<G>>> rows(2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i) rows[k].push_back(lift<G>(R(k, i), ctx));
  return OperatorField<G>(std::move(rows), R.reliable_degree());
}

/// Random form-(prep) operator: λ₀·Id + [[0, p(u, v)], [0, q(v)]].
Op random_prep(Rng& rng, const Rational& alpha, const Rational& lambda0, int n, int hi) {
  const S p = u_(n) + rng.series<Rational>(kUV, n, 2, hi);
  S q = v_(n).scaled(alpha);
  for (int j = 2; j <= hi; ++j)
    if (rng.coin()) q.add_term(Monomial{0, j}, rng.rational());
  const S l = S::constant(kUV, n, lambda0);
  return Op({{l, p}, {S(kUV, n), l + q}});
}

FormalChange<Rational> random_change(Rng& rng, int n, int hi) {
  std::vector<S> fwd = {u_(n), v_(n)};
  fwd[0] += rng.series<Rational>(kUV, n, 2, hi, {}, 3);
  fwd[1] += rng.series<Rational>(kUV, n, 2, hi, {}, 3);
  return FormalChange<Rational>::from_forward(fwd);
}

/// A degree-k slice satisfying both base equations when φ_i = 0, with a single
/// c monomial u^i v^{k−i}.
std::pair<S, S> c_slice(int k, int i, int n) {
  const S c = mono_term(i, k - i, Q(1), n);
  const S d = k - i == 0 ? S(kUV, n) : mono_term(i + 1, k - i - 1, Q(k - i, i + 1), n);
  return {c, d};
}

/// All (k, i) with 2 ≤ k ≤ K, 0 ≤ i ≤ k and i + 1 + α(k − i − 1) = 0, by
/// direct enumeration.
std::vector<std::pair<int, int>> brute_resonances(const Rational& alpha, int K) {
  std::vector<std::pair<int, int>> out;
  for (int k = 2; k <= K; ++k)
    for (int i = 0; i <= k; ++i)
      if ((Q(i + 1) + alpha * Q(k - i - 1)).is_zero()) out.emplace_back(k, i);
  return out;
}

/// q' ∘ (second coordinate of the total change) as a series in the original
/// coordinates.
S pulled_back_q(const NormalFormResult<Rational>& res, const FormalChange<Rational>& phi) {
  const int n = res.q.truncation();
  const auto& M = res.linear;
  std::vector<S> lin = {u_(n).scaled(M[0][0]) + v_(n).scaled(M[0][1]), u_(n).scaled(M[1][0]) + v_(n).scaled(M[1][1])};
  const auto mid = compose_many<Rational>(std::span<const S>(lin), std::span<const S>(phi.forward()));
  const auto total = compose_many<Rational>(std::span<const S>(res.change.forward()), std::span<const S>(mid));
  const std::vector<S> y = {S(kUV, n), total[1]};
  return compose<Rational>(res.q, std::span<const S>(y));
}

}  // namespace

TEST_CASE("base residual examples") {
  const int n = 6;
  const S z(kUV, n);
  const DegreeSlice<Rational> zero{3, z, z, z, z};
  auto [r1, r2] = base_equations_residual(zero, Q(1, 2));
  CHECK(r1.is_zero());
  CHECK(r2.is_zero());

  const DegreeSlice<Rational> res{2, z, z, P("u^2", n), z};
  std::tie(r1, r2) = base_equations_residual(res, Q(3));
  CHECK(r1.is_zero());
  CHECK(r2.is_zero());

  const DegreeSlice<Rational> av{4, P("v^4", n), z, z, z};
  std::tie(r1, r2) = base_equations_residual(av, Q(2, 3));
  CHECK(r1 == P("8/3*v^4", n));
  CHECK(r2.is_zero());
}

TEST_CASE("base residual is the degree-k part of [[R_k, R_1]]") {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = static_cast<int>(rng.uniform(2, 6));
    const int n = k + 1;
    const Rational alpha = rng.nonzero_rational(-4, 4, 3);
    const S a = rng.series<Rational>(kUV, n, k, k), b = rng.series<Rational>(kUV, n, k, k),
            c = rng.series<Rational>(kUV, n, k, k), d = rng.series<Rational>(kUV, n, k, k);
    const Op Rk({{a, b}, {c, d}});
    const Op R1({{S(kUV, n), u_(n)}, {S(kUV, n), v_(n).scaled(alpha)}});
    const auto T = fn_bracket(Rk, R1).homogeneous_part(k);
    const auto [r1, r2] = base_equations_residual(DegreeSlice<Rational>{k, a, b, c, d}, alpha);
    INFO("k = " << k << ", α = " << alpha.str());
    INFO("T^0_01 = " << format_series(T(0, 0, 1)) << ", T^1_01 = " << format_series(T(1, 0, 1)));
    INFO("r1 = " << format_series(r1) << ", r2 = " << format_series(r2));
    CHECK(T(0, 0, 1) == r1);
    CHECK(T(1, 0, 1) == r2);
  }
}

TEST_CASE("normalize_degree examples") {
  const int n = 4;
  const S z(kUV, n);
  SUBCASE("template is a fixed point") {
    const Op R = template_plus(Q(1, 2), Q(0), z, z, z, z);
    for (int k = 2; k <= n; ++k) {
      const auto step = normalize_degree(R, Q(1, 2), k);
      CHECK(step.change.is_identity());
      CHECK(step.R == R);
      CHECK_FALSE(step.obstruction);
    }
  }
  SUBCASE("α = 3, c = u² resonates at k = 2, i = 2") {
    const Op R = template_plus(Q(3), Q(0), z, z, P("u^2", n), z);
    const auto step = normalize_degree(R, Q(3), 2);
    REQUIRE(step.obstruction);
    CHECK(step.obstruction->kind == ObstructionKind::Resonance);
    CHECK(step.obstruction->degree == 2);
    CHECK(step.obstruction->m == 2);
    CHECK(step.obstruction->n == 0);
    CHECK(step.obstruction->factor == Q(0));
    CHECK(step.obstruction->factors.size() == 3);
  }
  SUBCASE("a-monomials are removed with coefficients a_i / i") {
    // Push a form-(prep) operator through v ↦ v + g and undo it.
    const Rational alpha = Q(1, 2);
    const Op R0 = template_plus(alpha, Q(1), z, P("u*v", n), z, P("5*v^2", n));
    const S g = P("2*u*v + 3*u^2", n);
    const Op R = transform_operator(R0, FormalChange<Rational>::from_step(2, {z, g}));
    const auto before = slice_of(R, 2);
    CHECK_FALSE(before.a.is_zero());
    CHECK_FALSE(before.c.is_zero());
    const auto step = normalize_degree(R, alpha, 2);
    CHECK_FALSE(step.obstruction);
    REQUIRE(step.diagnostics.removed.size() == 2);
    const auto t = slice_of(step.R, 2);
    CHECK(t.a.is_zero());
    CHECK(t.c.is_zero());
    CHECK(t.d == P("5*v^2", n));
    CHECK(is_nijenhuis(step.R, n - 1).nijenhuis);
  }
  SUBCASE("a₀ v^k signals a non-Nijenhuis input") {
    const Op R = template_plus(Q(1, 2), Q(0), P("v^2", n), z, z, z);
    CHECK_THROWS_AS(normalize_degree(R, Q(1, 2), 2), NotNijenhuisError);
  }
  SUBCASE("non-resonant c signals a non-Nijenhuis input") {
    const Op R = template_plus(Q(1, 2), Q(0), z, z, P("u*v", n), z);
    CHECK_THROWS_AS(normalize_degree(R, Q(1, 2), 2), NotNijenhuisError);
  }
  SUBCASE("wrong form is rejected") {
    const Op R = template_plus(Q(1, 2), Q(0), z, z, z, z);
    CHECK_THROWS_AS(normalize_degree(R, Q(1, 3), 2), DomainError);
    const Op R2 = template_plus(Q(1, 2), Q(0), P("u*v", n), z, z, P("-3/2*u*v", n));
    CHECK_THROWS_AS(normalize_degree(R2, Q(1, 2), 3), DomainError);
  }
}

TEST_CASE("resonance completeness against brute-force enumeration") {
  const int K = 12;
  for (const Rational alpha : {Q(3), Q(4), Q(5), Q(1, 2), Q(1, 3), Q(2, 5), Q(-1), Q(-2, 3), Q(-3, 2), Q(-1, 4)}) {
    const auto expected = brute_resonances(alpha, K);
    for (int k = 2; k <= K; ++k) {
      for (int i = 0; i <= k; ++i) {
        const int n = k;
        const auto [c, d] = c_slice(k, i, n);
        const Op R = template_plus(alpha, Q(0), S(kUV, n), S(kUV, n), c, d);
        const bool resonant = std::find(expected.begin(), expected.end(), std::pair{k, i}) != expected.end();
        INFO("α = " << alpha.str() << ", k = " << k << ", i = " << i);
        if (resonant) {
          const auto step = normalize_degree(R, alpha, k);
          REQUIRE(step.obstruction);
          CHECK(step.obstruction->kind == ObstructionKind::Resonance);
          CHECK(step.obstruction->m == i);
          CHECK(step.obstruction->n == k - i);
        } else {
          CHECK_THROWS_AS(normalize_degree(R, alpha, k), NotNijenhuisError);
        }
      }
    }
  }
  // The integer predictions themselves.
  CHECK(brute_resonances(Q(3), 12) == std::vector<std::pair<int, int>>{{2, 2}});
  CHECK(brute_resonances(Q(4), 12) == std::vector<std::pair<int, int>>{{3, 3}});
  CHECK(brute_resonances(Q(5), 12) == std::vector<std::pair<int, int>>{{4, 4}});
  CHECK(brute_resonances(Q(1, 2), 12).empty());
  CHECK(brute_resonances(Q(1, 3), 12).empty());
  CHECK(brute_resonances(Q(2, 5), 12).empty());
  CHECK(brute_resonances(Q(-1), 12).front() == std::pair{2, 0});
  CHECK(brute_resonances(Q(-2, 3), 12).front() == std::pair{5, 1});
}

TEST_CASE("α = −1 with a generic quadratic perturbation resonates at the first solvable degree") {
  Rng rng(11);
  const int n = 5;
  for (int trial = 0; trial < 5; ++trial) {
    // c = v², d = 2uv + d₀v² satisfies both base equations when α = −1.
    const S b = rng.series<Rational>(kUV, n, 2, 2);
    const Op R0 = template_plus(Q(-1), Q(2), S(kUV, n), b, P("v^2", n), P("2*u*v", n) + P("v^2", n));
    const Op R = transform_operator(R0, random_change(rng, n, 3));
    const auto res = normal_form(R, Q(-1), n);
    REQUIRE(res.obstruction);
    CHECK(res.obstruction->kind == ObstructionKind::Resonance);
    CHECK(res.obstruction->degree == 2);
    CHECK(res.obstruction->m == 0);
    CHECK(res.obstruction->n == 2);
  }
}

TEST_CASE("normal_form of a linear operator") {
  const int n = 5;
  const S z(kUV, n);
  const Op R = template_plus(Q(2, 5), Q(7), z, z, z, z);
  const auto res = normal_form(R, Q(2, 5), n);
  CHECK_FALSE(res.obstruction);
  CHECK(res.change.is_identity());
  CHECK(res.p == u_(n));
  CHECK(res.q == v_(n).scaled(Q(2, 5)));
  CHECK(res.lambda0 == Q(7));
}

TEST_CASE("normalization round trip") {
  Rng rng(2024);
  const Rational alphas[] = {Q(1, 2), Q(1, 3), Q(2, 5), Q(3, 2), Q(5, 7)};
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = trial < 4 ? 10 : 6;
    const Rational alpha = alphas[trial % 5];
    const Op R0 = random_prep(rng, alpha, rng.rational(), n, n);
    const auto phi = random_change(rng, n, 3);
    const Op R = transform_operator(R0, phi);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = normal_form(R, alpha, n);
    worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    INFO("trial " << trial << ", α = " << alpha.str());
    REQUIRE_FALSE(res.obstruction);
    // Form (prep).
    const auto S_ = res.R - Op::scalar(kUV, n, res.lambda0);
    CHECK(S_(0, 0).is_zero());
    CHECK(S_(1, 0).is_zero());
    CHECK(res.q.derivative(0).is_zero());
    CHECK(res.p.truncated_to(1) == u_(n));
    CHECK(res.q.truncated_to(1) == v_(n).scaled(alpha));
    // The tower reproduces the output.
    CHECK(transform_operator(apply_linear_change(R, res.linear), res.change) == res.R);
    // q is an eigenvalue function: q' ∘ y' = q₀.
    CHECK(pulled_back_q(res, phi) == R0(1, 1) - S::constant(kUV, n, res.lambda0));
    // Idempotence.
    const auto again = normal_form(res.R, alpha, n);
    CHECK(again.change.is_identity());
    CHECK(again.R == res.R);
  }
  MESSAGE("worst normal_form time " << worst << " s");
  CHECK(worst < 10.0);
}

TEST_CASE("torsion recheck after each accepted step") {
  Rng rng(77);
  const int n = 6;
  const Rational alpha = Q(1, 3);
  const Op R = transform_operator(random_prep(rng, alpha, Q(0), n, n), random_change(rng, n, 3));
  Op cur = R;
  for (int k = 2; k <= n; ++k) {
    const auto step = normalize_degree(cur, alpha, k);
    REQUIRE_FALSE(step.obstruction);
    const auto check = is_nijenhuis(step.R, step.R.truncation() - 1);
    CHECK(check.nijenhuis);
    cur = step.R;
  }
}

TEST_CASE("float normal form agrees with the rational one") {
  Rng rng(5);
  const int n = 6;
  const Rational alpha = Q(2, 5);
  const Op R = transform_operator(random_prep(rng, alpha, Q(1, 3), n, n), random_change(rng, n, 3));
  const auto exact = normal_form(R, alpha, n);
  const BigFloat::Context ctx{256};
  const auto approx = normal_form(lift<BigFloat>(R, ctx), ctx.make(alpha), n);
  REQUIRE_FALSE(approx.obstruction);
  CHECK(approx.R(0, 0).truncated_to(n) == approx.R(0, 0).truncated_to(0));
  const auto diff = approx.q - lift<BigFloat>(exact.q, ctx);
  CHECK(max_abs_coefficient(diff) < 1e-60);
  CHECK(max_abs_coefficient(approx.p - lift<BigFloat>(exact.p, ctx)) < 1e-60);
}

TEST_CASE("float resonance and small divisors") {
  const int n = 3;
  const BigFloat::Context ctx{256};
  const Series<BigFloat> z(kUV, n, ctx);
  const auto u = Series<BigFloat>::variable(kUV, n, 0, ctx);
  const auto v = Series<BigFloat>::variable(kUV, n, 1, ctx);
  auto build = [&](const BigFloat& alpha) {
    const auto c = Series<BigFloat>::monomial(kUV, n, Monomial{2, 0}, ctx.make(1L));
    return OperatorField<BigFloat>({{z, u}, {c, v.scaled(alpha)}});
  };
  // α = 3 up to 2^-200: below the hard floor.
  const auto near = ctx.make(3L) + BigFloat::power_of_two(-250, 256);
  const auto r1 = normalize_degree(build(near), near, 2);
  REQUIRE(r1.obstruction);
  CHECK(r1.obstruction->kind == ObstructionKind::Resonance);
  // α = 3 + 2^-150: a small divisor. The slice is then not exactly Nijenhuis,
  // which is the situation the floor is meant to flag.
  const auto mid = ctx.make(3L) + BigFloat::power_of_two(-150, 256);
  const auto r2 = normalize_degree(build(mid), mid, 2);
  REQUIRE(r2.obstruction);
  CHECK(r2.obstruction->kind == ObstructionKind::SmallDivisor);
  // α = 3 + 2^-20: no floor applies, so the nonzero c is a contradiction.
  const auto far = ctx.make(3L) + BigFloat::power_of_two(-20, 256);
  CHECK_THROWS_AS(normalize_degree(build(far), far, 2), NotNijenhuisError);
}

TEST_CASE("eigen coordinate") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    const Rational alpha = rng.nonzero_rational(-3, 3, 3);
    // Form (prep2): λ₀ + [[0, h], [0, αv]].
    const S h = u_(n) + rng.series<Rational>(kUV, n, 2, n);
    const Rational l0 = rng.rational();
    const S l = S::constant(kUV, n, l0);
    const Op R0({{l, h}, {S(kUV, n), l + v_(n).scaled(alpha)}});
    CHECK(eigen_coordinate(R0, alpha) == v_(n));
    // Trace identity.
    CHECK((R0 - Op::scalar(kUV, n, l0)).trace().scaled(Rational(1) / alpha) == v_(n));
    // Transported: μ = v ∘ φ⁻¹.
    const auto phi = random_change(rng, n, 3);
    const Op R = transform_operator(R0, phi);
    const S mu = eigen_coordinate(R, alpha);
    INFO("α = " << alpha.str());
    CHECK(mu == phi.inverse()[1]);
    // det(R − λ₀ − αμ) = 0.
    const auto M = R - Op::scalar(kUV, n, l0) - Op({{mu.scaled(alpha), S(kUV, n)}, {S(kUV, n), mu.scaled(alpha)}});
    CHECK(M.determinant().is_zero());
  }
  const S z(kUV, 4);
  CHECK_THROWS_AS(eigen_coordinate(Op({{z, u_(4)}, {z, z}}), Q(0)), DomainError);
  CHECK_THROWS_AS(eigen_coordinate(Op({{z, u_(4)}, {z, z}}), Q(1)), DomainError);
}

TEST_CASE("triangular form") {
  Rng rng(8);
  const int n = 6;
  const Rational alpha = Q(-3, 2);
  const S h = u_(n) + rng.series<Rational>(kUV, n, 2, n);
  const Op R0({{S(kUV, n), h}, {S(kUV, n), v_(n).scaled(alpha)}});
  const auto same = to_triangular_form(R0, alpha);
  CHECK(same.change.is_identity());
  CHECK(same.h == h);

  const auto phi = random_change(rng, n, 3);
  const auto tri = to_triangular_form(transform_operator(R0, phi), alpha);
  CHECK(tri.R(1, 0).is_zero());
  CHECK(tri.R(1, 1) == v_(n).scaled(alpha));
  CHECK(tri.h.truncated_to(1) == u_(n));
  // The new h is the old one transported as a vector field: λ̄ = λ'(u, v) has
  // ξ(λ̄) = h̄ ∘ (λ̄, μ̄).
  const auto total_fwd = compose_many<Rational>(std::span<const S>(tri.change.forward()),
                                                std::span<const S>(phi.forward()));
  const S xi_of_lambda = total_fwd[0].derivative(0) * h + total_fwd[0].derivative(1) * v_(n).scaled(alpha);
  CHECK(compose<Rational>(tri.h, std::span<const S>(total_fwd)) == xi_of_lambda);
}

TEST_CASE("linearize_triangular") {
  SUBCASE("h = λ gives the identity") {
    const auto lin = linearize_triangular(u_(6), Q(1, 3), 6);
    CHECK_FALSE(lin.obstruction);
    CHECK(lin.g == u_(6));
    CHECK(linearizing_change(lin).is_identity());
  }
  SUBCASE("transport linearizes") {
    Rng rng(12);
    for (const Rational alpha : {Q(1, 3), Q(-5, 3), Q(7, 2)}) {
      const int n = 7;
      const S h = u_(n) + rng.series<Rational>(kUV, n, 2, n);
      const auto lin = linearize_triangular(h, alpha, n);
      REQUIRE_FALSE(lin.obstruction);
      const Op T({{S(kUV, n), h}, {S(kUV, n), v_(n).scaled(alpha)}});
      const Op L = transform_operator(T, linearizing_change(lin));
      CHECK(L == Op({{S(kUV, n), u_(n)}, {S(kUV, n), v_(n).scaled(alpha)}}));
      // Every monomial of degree 2 … n is logged once.
      CHECK(lin.divisors.size() == static_cast<std::size_t>((n + 1) * (n + 2) / 2 - 3));
    }
  }
  SUBCASE("α = −1 resonates at λ²μ") {
    const int n = 4;
    const auto lin = linearize_triangular(P("u + u*v + u^2*v", n), Q(-1), n);
    REQUIRE(lin.obstruction);
    CHECK(lin.obstruction->kind == ObstructionKind::Resonance);
    CHECK(lin.obstruction->degree == 3);
    CHECK(lin.obstruction->m == 2);
    CHECK(lin.obstruction->n == 1);
    // The whole degree is logged before aborting.
    CHECK(lin.obstruction->factors.size() == 4);
  }
  SUBCASE("an inactive resonant monomial is not an obstruction") {
    const auto lin = linearize_triangular(P("u + v^2", 4), Q(-1), 4);
    CHECK_FALSE(lin.obstruction);
  }
  SUBCASE("h without a λ linear part is rejected") {
    CHECK_THROWS_AS(linearize_triangular(P("u + v", 4), Q(1, 2), 4), DomainError);
  }
}

TEST_CASE("golden divisors stay above the convergent bound") {
  const BigFloat::Context ctx{256};
  const auto cf = ContinuedFraction::golden(-1);
  const BigFloat alpha = cf.value(256);
  Rng rng(3);
  const int n = 12;
  Series<BigFloat> h = Series<BigFloat>::variable(kUV, n, 0, ctx);
  for (int d = 2; d <= n; ++d) Rng::each_monomial(2, d, [&](const Monomial& m) { h.add_term(m, ctx.make(rng.nonzero_rational())); });
  const auto lin = linearize_triangular(h, alpha, n);
  REQUIRE_FALSE(lin.obstruction);
  // Best approximations: among denominators below q_{j+1} nothing beats
  // |q_j α − p_j| ≥ 1/(q_j + q_{j+1}); q_j is the last convergent that fits
  // in degree n as the monomial λ^{p_j+1} μ^{q_j}.
  std::size_t j = 1;
  while (true) {
    const auto next = cf.convergent(j + 1);
    if (next->p.get_si() + 1 + next->q.get_si() > n) break;
    ++j;
  }
  const double bound = 1.0 / (cf.convergent(j)->q.get_d() + cf.convergent(j + 1)->q.get_d());
  MESSAGE("min |m + αn − 1| = " << lin.min_abs_divisor << " at (" << lin.min_m << ", " << lin.min_n << "), bound " << bound);
  CHECK(lin.min_abs_divisor >= bound);
  CHECK(lin.min_abs_divisor <= 2 * bound);
}

TEST_CASE("Liouville divisors fall below 1e-30") {
  const auto alpha_cf = parse_alpha("-exp-floor:prefix=70");
  REQUIRE(alpha_cf.is_cf());
  const auto& cf = std::get<ContinuedFraction>(alpha_cf.value);
  const BigFloat::Context ctx{512};
  const BigFloat alpha = cf.value(512);
  const int n = 72;
  const Series<BigFloat> h = parse_series<BigFloat>("u + u^2 + u*v", kUV, n, ctx);
  DivisorPolicy policy;
  policy.divisor_floor_log2 = -400;
  const auto lin = linearize_triangular(h, alpha, n, policy);
  CHECK_FALSE(lin.obstruction);
  MESSAGE("min divisor " << lin.min_abs_divisor << " at (" << lin.min_m << ", " << lin.min_n << ")");
  CHECK(lin.min_abs_divisor < 1e-30);
  CHECK(lin.min_m + lin.min_n <= n);
  // Default floor: the tiny divisor is flagged once a numerator reaches it.
  const auto flagged = linearize_triangular(h, alpha, n);
  if (flagged.obstruction) CHECK(flagged.obstruction->kind == ObstructionKind::SmallDivisor);
}
