#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "nijlin/brjuno/brjuno.hpp"
#include "nijlin/monodromy/monodromy.hpp"
#include "nijlin/series/io.hpp"

using namespace nijlin;

namespace {

const VarList kUV = {"u", "v"};
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
const Complex I(0.0, 1.0);

ComplexPolynomial poly(std::string_view text) {
  return ComplexPolynomial(parse_series<Rational>(text, kUV, 6));
}

std::vector<Complex> ladder(int n, double top = 1e-2) {
  std::vector<Complex> z;
  for (int i = 0; i < n; ++i) z.push_back(top * std::pow(0.5, i) * std::exp(I * (0.3 + i)));
  return z;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("complex polynomial evaluation") {
  const auto h = poly("u + 2*u^2*v - 3*v^3 + 1");
  const Complex u(0.3, -0.2), v(-0.1, 0.5);
  const Complex want = u + 2.0 * u * u * v - 3.0 * v * v * v + 1.0;
  CHECK(std::abs(h(u, v) - want) < 1e-15);
}

TEST_CASE("integrate_complex on the linear system") {
  const auto h = poly("u");
  for (const Complex alpha : {Complex(0.5, 0.0), Complex(-0.7, 0.0), Complex(kGolden, 0.0)}) {
    for (const Complex dt : {Complex(0.5, 0.0), Complex(0.0, 1.0), Complex(-0.3, 2.0)}) {
      const ComplexPoint p0{Complex(0.2, 0.1), Complex(-0.1, 0.05)};
      const auto p = integrate_complex(h, alpha, p0, {{Complex(0.0, 0.0), dt}}, {1e-10, 10.0});
      CHECK(rel(p.u, p0.u * std::exp(dt)) < 1e-8);
      CHECK(rel(p.v, p0.v * std::exp(alpha * dt)) < 1e-8);
    }
  }
  // A closed path in time returns to the start.
  const ComplexPoint p0{Complex(0.2, 0.0), Complex(0.1, 0.0)};
  const auto loop = integrate_complex(h, Complex(0.5, 0.0), p0,
                                      {{Complex(0, 0), Complex(1, 0), Complex(1, 1), Complex(0, 1), Complex(0, 0)}});
  CHECK(std::abs(loop.u - p0.u) < 1e-8);
  CHECK(std::abs(loop.v - p0.v) < 1e-8);
}

TEST_CASE("integrate_complex edge cases") {
  const auto h = poly("u + u^2");
  const ComplexPoint p0{Complex(0.2, 0.1), Complex(0.3, 0.0)};
  const auto same = integrate_complex(h, Complex(0.5, 0.0), p0, {{Complex(1, 1), Complex(1, 1)}});
  CHECK(same.u == p0.u);
  CHECK(same.v == p0.v);
  const auto sep = integrate_complex(h, Complex(0.5, 0.0), {Complex(0.1, 0.0), Complex(0.0, 0.0)},
                                     {{Complex(0, 0), Complex(0, 2)}});
  CHECK(std::abs(sep.v) == 0.0);
  // u̇ = u² blows up at t = 1/u₀.
  CHECK_THROWS_AS(integrate_complex(poly("u^2"), Complex(1.0, 0.0), {Complex(0.5, 0.0), Complex(0.0, 0.0)},
                                    {{Complex(0, 0), Complex(3, 0)}}),
                  IntegrationError);
}

TEST_CASE("monodromy of h = u") {
  for (const double alpha : {kGolden, 1.0 / 3.0, -0.7}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto samples = monodromy_map(poly("u"), Complex(alpha, 0.0), LoopSpec{}, ladder(8));
    for (const auto& s : samples) {
      CHECK_FALSE(s.failure);
      CHECK_FALSE(s.flagged);
      CHECK(rel(s.z1 / s.z0, linear_multiplier(alpha)) < 1e-6);
    }
    const auto fit = germ_multiplier(samples);
    CHECK(rel(fit.multiplier, linear_multiplier(alpha)) < 1e-6);
    CHECK(fit.residual < 1e-6);
    LoopSpec twice;
    twice.winding = 2;
    const auto fit2 = germ_multiplier(monodromy_map(poly("u"), Complex(alpha, 0.0), twice, ladder(8)));
    CHECK(std::abs(fit2.multiplier - fit.multiplier * fit.multiplier) < 1e-5);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 5.0);
  }
  const auto zero = monodromy_map(poly("u"), Complex(0.4, 0.0), LoopSpec{}, {Complex(0.0, 0.0)});
  CHECK(zero.front().z1 == Complex(0.0, 0.0));
}

TEST_CASE("perturbed h keeps the linear multiplier") {
  for (const char* text : {"u + u^2", "u + u*v", "u + u^2 + 3*u*v^2"}) {
    INFO(text);
    const double alpha = 1.0 / 3.0;
    const auto samples = monodromy_map(poly(text), Complex(alpha, 0.0), LoopSpec{}, ladder(10, 1e-3));
    const auto fit = germ_multiplier(samples);
    CHECK(rel(fit.multiplier, linear_multiplier(alpha)) < 1e-4);
  }
}

TEST_CASE("homotopy invariance and tolerance convergence") {
  const auto h = poly("u + u^2 + u*v");
  const double alpha = -0.7;
  LoopSpec small, large;
  small.radius = 0.05;
  large.radius = 0.2;
  const auto a = germ_multiplier(monodromy_map(h, Complex(alpha, 0.0), small, ladder(8, 1e-4)));
  const auto b = germ_multiplier(monodromy_map(h, Complex(alpha, 0.0), large, ladder(8, 1e-4)));
  CHECK(std::abs(a.multiplier - b.multiplier) < 1e-5);

  double previous = 1.0;
  for (const double tol : {1e-4, 1e-6, 1e-8}) {
    LoopSpec loop;
    loop.tol = tol;
    const auto fit = germ_multiplier(monodromy_map(poly("u"), Complex(kGolden, 0.0), loop, ladder(4)));
    const double err = std::abs(fit.multiplier - linear_multiplier(kGolden));
    MESSAGE("tol " << tol << " error " << err);
    CHECK(err <= previous);
    CHECK(err < 10 * tol);
    previous = err;
  }
}

TEST_CASE("multiplier tracks convergents of the golden mean") {
  const auto cf = ContinuedFraction::golden();
  const auto fit = germ_multiplier(monodromy_map(poly("u"), Complex(kGolden, 0.0), LoopSpec{}, ladder(4)));
  for (std::size_t n = 2; n <= 12; ++n) {
    const auto c = *cf.convergent(n), c1 = *cf.convergent(n + 1);
    const Complex approx = linear_multiplier(c.p.get_d() / c.q.get_d());
    const double bound = 2 * std::numbers::pi / (c.q.get_d() * c1.q.get_d());
    CHECK(std::abs(fit.multiplier - approx) <= bound + 1e-6);
  }
}

TEST_CASE("germ_multiplier input checks") {
  std::vector<MonodromySample> zeros(5, MonodromySample{Complex(0, 0), Complex(0, 0), 0.0, false, std::nullopt});
  CHECK_THROWS_AS(germ_multiplier(zeros), DomainError);
  std::vector<MonodromySample> same(5, MonodromySample{Complex(1e-3, 0), Complex(1e-3, 0), 0.0, false, std::nullopt});
  CHECK_THROWS_AS(germ_multiplier(same), DomainError);
  LoopSpec bad;
  bad.radius = 2.0;
  CHECK_THROWS_AS(monodromy_map(poly("u"), Complex(0.5, 0.0), bad, ladder(3)), DomainError);
}

TEST_CASE("escaping lifts are reported per sample") {
  // α large and a big z₀: v grows past the neighbourhood on the way round.
  LoopSpec loop;
  loop.domain_radius = 0.5;
  const auto samples = monodromy_map(poly("u"), Complex(0.0, -1.0), loop, {Complex(0.4, 0.0), Complex(1e-4, 0.0)});
  CHECK(samples[0].failure);
  CHECK_FALSE(samples[1].failure);
}
