#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "../support/random.hpp"
#include "nijlin/error.hpp"
#include "nijlin/lsa/io.hpp"
#include "nijlin/series/io.hpp"

using namespace nijlin;
using nijlin::testing::Rng;

namespace {

using Table = std::array<std::array<std::array<long, 2>, 2>, 2>;  // [k][i][j]

Lsa<Rational> from_table(const Table& t) {
  Lsa<Rational> A(2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) A.set(k, i, j, Rational(t[k][i][j]));
  return A;
}

// Plain-integer associator, written independently of Lsa::product.
std::array<long, 2> imul(const Table& a, std::array<long, 2> x, std::array<long, 2> y) {
  std::array<long, 2> r{0, 0};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[k] += a[k][i][j] * x[i] * y[j];
  return r;
}

bool brute_left_symmetric(const Table& a) {
  const std::array<std::array<long, 2>, 2> e{{{1, 0}, {0, 1}}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        auto ass = [&](int p, int q) {
          const auto l = imul(a, imul(a, e[p], e[q]), e[k]);
          const auto r = imul(a, e[p], imul(a, e[q], e[k]));
          return std::array<long, 2>{l[0] - r[0], l[1] - r[1]};
        };
        if (ass(i, j) != ass(j, i)) return false;
      }
  return true;
}

Table random_table(Rng& rng) {
  Table t{};
  for (auto& plane : t)
    for (auto& row : plane)
      for (auto& x : row) x = rng.uniform(-2, 2);
  return t;
}

Matrix<Rational> random_invertible(Rng& rng) {
  while (true) {
    Matrix<Rational> P{{rng.rational(), rng.rational()}, {rng.rational(), rng.rational()}};
    if (!(P[0][0] * P[1][1] - P[0][1] * P[1][0]).is_zero()) return P;
  }
}

std::vector<ClassLabel> sample_labels() {
  std::vector<ClassLabel> out;
  for (const char* s : {"b1:-2/3", "b1:0", "b1:1", "b1:3", "b1:1/2", "b1:2", "b1:-7", "b2:3", "b2:1", "b2:-1/2",
                        "b3", "b4plus", "b4minus", "b5", "c0", "c2", "c3", "c4", "c5plus", "c5minus"}) {
    out.push_back(ClassLabel::parse(s));
  }
  return out;
}

}  // namespace

TEST_CASE("extraction from templates") {
  // b1,α: R = [[0, x], [0, αy]] so ∂R^0_1/∂x = 1 and ∂R^1_1/∂y = α.
  const auto b1 = template_lsa<Rational>(ClassLabel::parse("b1:-2/3"));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        Rational expect = 0;
        if (k == 0 && i == 1 && j == 0) expect = 1;
        if (k == 1 && i == 1 && j == 1) expect = Rational::parse("-2/3");
        CHECK(b1(k, i, j) == expect);
      }
  const auto e1 = b1.basis_vector(0), e2 = b1.basis_vector(1);
  CHECK(b1.product(e2, e1) == e1);
  CHECK(b1.product(e2, e2) == std::vector<Rational>{0, Rational::parse("-2/3")});
  CHECK(b1.product(e1, e2) == std::vector<Rational>{0, 0});

  CHECK(template_lsa<Rational>(ClassLabel::parse("c0")).is_zero());

  // c5+: [[y, x], [x, y]]: e2 is a unit and e1⋆e1 = e2.
  const auto c5 = template_lsa<Rational>(ClassLabel::parse("c5+"));
  CHECK(c5.product(e1, e1) == e2);
  CHECK(c5.product(e2, e1) == e1);
  CHECK(c5.product(e1, e2) == e1);
  CHECK(c5.product(e2, e2) == e2);
}

TEST_CASE("extraction at a scalar-type basepoint") {
  const VarList v{"x", "y"};
  // R = 3·Id + [[y, x], [0, y]] + x²·E, taken at p = (1, 0): R(p) must be
  // scalar for the linear part to be defined.
  auto R = OperatorField<Rational>({{parse_series<Rational>("3 + y", v, 3), parse_series<Rational>("x - 1", v, 3)},
                                    {parse_series<Rational>("0", v, 3), parse_series<Rational>("2 + y + x^2", v, 3)}});
  const std::vector<Rational> p{1, 0};
  CHECK(scalar_part(R, std::span<const Rational>(p)) == 3);
  const auto A = extract_linear_lsa(R, std::span<const Rational>(p));
  CHECK(A(1, 1, 0) == 2);  // ∂(x²)/∂x at x = 1
  CHECK(A(0, 0, 1) == 1);
  CHECK(A(0, 1, 0) == 1);
  CHECK_THROWS_AS(extract_linear_lsa(R), DomainError);  // R(0) = diag(3, 2)
}

TEST_CASE("left symmetry") {
  for (const auto& l : sample_labels()) {
    INFO(l.str());
    CHECK(check_left_symmetric(template_lsa<Rational>(l)).left_symmetric);
  }
  CHECK(check_left_symmetric(Lsa<Rational>(2)).left_symmetric);

  Rng rng(5);
  int failures = 0;
  for (int t = 0; t < 500; ++t) {
    const Table tab = random_table(rng);
    const auto A = from_table(tab);
    const auto r = check_left_symmetric(A);
    CHECK(r.left_symmetric == brute_left_symmetric(tab));
    if (!r.left_symmetric) {
      ++failures;
      REQUIRE(r.violation.has_value());
      const auto [i, j, k] = *r.violation;
      const auto ei = A.basis_vector(i), ej = A.basis_vector(j), ek = A.basis_vector(k);
      auto ass = [&](const auto& x, const auto& y) {
        auto l = A.product(A.product(x, y), ek);
        const auto rr = A.product(x, A.product(y, ek));
        for (std::size_t q = 0; q < 2; ++q) l[q] -= rr[q];
        return l;
      };
      CHECK(ass(ei, ej) != ass(ej, ei));
    }
  }
  CHECK(failures > 100);
}

TEST_CASE("associated Lie algebra") {
  CHECK(associated_lie(template_lsa<Rational>(ClassLabel::parse("c4"))).abelian);
  CHECK_FALSE(associated_lie(template_lsa<Rational>(ClassLabel::parse("b3"))).abelian);
  CHECK(associated_lie(Lsa<Rational>(2)).abelian);
  for (const auto& l : sample_labels()) {
    const auto info = associated_lie(template_lsa<Rational>(l));
    CHECK(info.jacobi);
    CHECK(info.abelian == (to_string(l.family)[0] == 'c'));
  }
  // Jacobi holds whenever the algebra is left-symmetric (3D random tables).
  Rng rng(17);
  int lsa_count = 0;
  for (int t = 0; t < 3000; ++t) {
    Lsa<Rational> A(3);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          if (rng.coin(4)) A.set(k, i, j, Rational(rng.uniform(-1, 1)));
    if (!check_left_symmetric(A).left_symmetric) continue;
    ++lsa_count;
    CHECK(associated_lie(A).jacobi);
  }
  CHECK(lsa_count > 20);
}

TEST_CASE("operator round trip and the Nijenhuis equivalence") {
  for (const auto& l : sample_labels()) {
    const auto A = template_lsa<Rational>(l);
    CHECK(extract_linear_lsa(operator_of_lsa(A)) == A);
    const auto R = template_operator<Rational>(l, default_vars(2), 1);
    CHECK(operator_of_lsa(extract_linear_lsa(R)) == R);
  }
  CHECK(operator_of_lsa(Lsa<Rational>(2)) == OperatorField<Rational>::zero({"x", "y"}, 1));

  Rng rng(2024);
  int discrepancies = 0, positives = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto A = from_table(random_table(rng));
    const bool ls = check_left_symmetric(A).left_symmetric;
    // Linear R: torsion is homogeneous of degree 1, so truncation 2 suffices.
    const bool nij = is_nijenhuis(operator_of_lsa(A, 2), 1).nijenhuis;
    if (ls != nij) ++discrepancies;
    if (ls) ++positives;
  }
  CHECK(discrepancies == 0);
  CHECK(positives > 0);
}

TEST_CASE("identification of templates") {
  for (const auto& l : sample_labels()) {
    INFO(l.str());
    const auto id = identify_2d(template_lsa<Rational>(l));
    CHECK(id.status == IdentifyStatus::Identified);
    REQUIRE(id.label.has_value());
    CHECK(same_label(*id.label, l));
    REQUIRE(id.witness.has_value());
    CHECK(*id.witness == identity_matrix<Rational>(2, {}));
    CHECK(id.verified);
  }
}

TEST_CASE("identification is conjugation invariant") {
  Rng rng(99);
  for (const auto& l : sample_labels()) {
    INFO(l.str());
    const auto T = template_lsa<Rational>(l);
    for (int t = 0; t < 200; ++t) {
      const auto P = random_invertible(rng);
      const auto A = T.in_basis(P);
      const auto id = identify_2d(A);
      REQUIRE(id.label.has_value());
      CHECK(same_label(*id.label, l));
      CHECK(id.verified);
      REQUIRE(id.change.has_value());
      // x̄ = P x takes the operator to the template operator.
      CHECK(apply_linear_change(operator_of_lsa(A), *id.change) == template_operator<Rational>(l, {"x", "y"}, 1));
    }
  }
}

TEST_CASE("identification of random left-symmetric tables") {
  Rng rng(7);
  int seen = 0;
  for (int t = 0; t < 4000; ++t) {
    Table tab{};
    for (auto& plane : tab)
      for (auto& row : plane)
        for (auto& x : row) x = rng.coin() ? rng.uniform(-2, 2) : 0;
    if (!brute_left_symmetric(tab)) {
      CHECK(identify_2d(from_table(tab)).status == IdentifyStatus::NotLeftSymmetric);
      continue;
    }
    ++seen;
    const auto id = identify_2d(from_table(tab));
    CHECK(id.status == IdentifyStatus::Identified);
    if (id.witness) {
      CHECK(id.verified);
    } else {
      // Only square-root-dependent families may lack an exact witness.
      const auto f = id.label->family;
      CHECK((f == Family::b4plus || f == Family::b4minus || f == Family::c5plus || f == Family::c5minus));
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("float-mode identification") {
  const BigFloat::Context ctx{256};
  Rng rng(12);
  const auto P = random_invertible(rng);
  Matrix<BigFloat> Pf(2, std::vector<BigFloat>(2, ctx.make(0L)));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) Pf[i][j] = ctx.make(P[i][j]);

  const auto alpha = ClassLabel::parse("b1:-0.3125", 256);
  const auto A = template_lsa<BigFloat>(alpha, ctx).in_basis(Pf);
  const auto id = identify_2d(A);
  CHECK(id.status == IdentifyStatus::Identified);
  CHECK(id.label->family == Family::b1);
  CHECK(id.label->param->to_double() == doctest::Approx(-0.3125).epsilon(1e-14));
  CHECK(id.verified);

  for (const char* s : {"c5-", "c5+", "b4+", "b4-", "c4", "b5", "b3", "c2", "c3"}) {
    INFO(s);
    const auto l = ClassLabel::parse(s);
    const auto B = template_lsa<BigFloat>(l, ctx).in_basis(Pf);
    const auto r = identify_2d(B);
    CHECK(r.status == IdentifyStatus::Identified);
    CHECK(r.label->family == l.family);
    CHECK(r.verified);
  }

  // α within 1e-9 of the b1/b3 boundary at α = 1.
  const auto near = identify_2d(template_lsa<BigFloat>(ClassLabel::parse("b1:1.000000001", 256), ctx).in_basis(Pf));
  CHECK(near.status == IdentifyStatus::UnclassifiedAtTolerance);
  CHECK(near.note.find("α − 1") != std::string::npos);

  Lsa<BigFloat> bad(2, ctx);
  bad.set(0, 0, 0, ctx.make(1L));
  bad.set(1, 0, 1, ctx.make(1L));
  bad.set(0, 1, 1, ctx.make(1L));
  CHECK(identify_2d(bad).status == IdentifyStatus::NotLeftSymmetric);
}

TEST_CASE("labels") {
  CHECK(ClassLabel::parse("b4+").family == Family::b4plus);
  CHECK(ClassLabel::parse("c5minus").family == Family::c5minus);
  const auto c1 = ClassLabel::parse("c1");
  CHECK(c1.family == Family::c0);
  CHECK(c1.c1_alias);
  CHECK(ClassLabel::parse("b1:alpha=3").str() == "b1:3");
  CHECK(ClassLabel::parse("b1:-golden").param->is_cf());
  CHECK_THROWS_AS(ClassLabel::parse("b1"), ParseError);
  CHECK_THROWS_AS(ClassLabel::parse("c4:2"), ParseError);
  CHECK_THROWS_AS(ClassLabel::parse("d7"), ParseError);
  CHECK_THROWS_AS(ClassLabel::parse("b2:0"), DomainError);
  CHECK_THROWS_AS(template_lsa<Rational>(ClassLabel::parse("b1:golden")), DomainError);
}

TEST_CASE("degeneracy verdicts") {
  auto verdict = [](const char* l, Category c, std::optional<BrjunoCertificate> cert = std::nullopt) {
    return degeneracy_verdict(ClassLabel::parse(l), c, cert).outcome;
  };
  CHECK(verdict("b3", Category::Smooth) == Outcome::Nondegenerate);
  CHECK(verdict("b1:3", Category::Analytic) == Outcome::Degenerate);
  CHECK(verdict("b1:golden", Category::Smooth) == Outcome::Nondegenerate);
  CHECK(verdict("b1:golden", Category::Analytic) == Outcome::Nondegenerate);
  CHECK(verdict("b1:-golden", Category::Smooth) == Outcome::Degenerate);

  const auto liou = make_liouville(exp_floor_rule()).negated();
  const auto cert = brjuno_decide(liou);
  CHECK(degeneracy_verdict(ClassLabel{Family::b1, Alpha{liou}}, Category::Analytic, cert).outcome ==
        Outcome::Degenerate);
  CHECK(verdict("b1:-golden", Category::Analytic, brjuno_decide(ContinuedFraction::golden(-1))) ==
        Outcome::Nondegenerate);
  CHECK_THROWS_AS(verdict("b1:-golden", Category::Analytic), DomainError);

  CHECK(verdict("b1:2", Category::Analytic) == Outcome::Nondegenerate);
  CHECK(verdict("b1:2/5", Category::Smooth) == Outcome::Nondegenerate);
  CHECK(verdict("b1:-2/3", Category::Analytic) == Outcome::Degenerate);
  CHECK(verdict("b1:0", Category::Analytic) == Outcome::Degenerate);
  CHECK(verdict("b1:1/7", Category::Analytic) == Outcome::Degenerate);

  for (Category c : {Category::Smooth, Category::Analytic}) {
    for (const char* d : {"c0", "c1", "c2", "c3", "c4", "b5", "b2:3", "b2:-1"}) CHECK(verdict(d, c) == Outcome::Degenerate);
    for (const char* n : {"b4+", "b4-", "c5+", "c5-", "b3"}) CHECK(verdict(n, c) == Outcome::Nondegenerate);
  }

  // Floats decide only α < 0 in the smooth category.
  CHECK(degeneracy_verdict(ClassLabel::parse("b1:-0.5", 256), Category::Smooth).outcome == Outcome::Degenerate);
  CHECK(degeneracy_verdict(ClassLabel::parse("b1:-0.5", 256), Category::Analytic).outcome == Outcome::Unknown);
  CHECK(degeneracy_verdict(ClassLabel::parse("b1:3.0", 256), Category::Smooth).outcome == Outcome::Unknown);

  // For rationals the two Σ-sets agree, so the two categories agree.
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const Rational a = rng.rational(-12, 12, 6);
    const ClassLabel l{Family::b1, Alpha{a}};
    CHECK(degeneracy_verdict(l, Category::Smooth).outcome == degeneracy_verdict(l, Category::Analytic).outcome);
  }
}

TEST_CASE("json") {
  Rng rng(41);
  const auto A = template_lsa<Rational>(ClassLabel::parse("b1:-2/3")).in_basis(random_invertible(rng));
  const Json j = lsa_to_json(A);
  CHECK(j.at("dim") == 2);
  CHECK(lsa_from_json<Rational>(j) == A);
  CHECK(lsa_from_json<Rational>(Json::parse(R"({"a": [[[0,0],[1,0]],[[0,0],[0,"-2/3"]]]})")) ==
        template_lsa<Rational>(ClassLabel::parse("b1:-2/3")));
  CHECK_THROWS_AS(lsa_from_json<Rational>(Json::parse(R"({"dim": 2, "a": [[[0]]]})")), ParseError);

  const Json id = identification_to_json(identify_2d(A));
  CHECK(id.at("label") == "b1:-2/3");
  CHECK(id.at("params").at("alpha").at("value") == "-2/3");
  CHECK(id.at("verified") == true);

  const Json v = verdict_to_json(degeneracy_verdict(ClassLabel::parse("c1"), Category::Smooth));
  for (const char* key : {"label", "params", "category", "verdict", "evidence"}) CHECK(v.contains(key));
  CHECK(v.at("verdict") == "Degenerate");
  CHECK(v.contains("alias"));
}
