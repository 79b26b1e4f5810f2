#pragma once

#include <concepts>
#include <string>

#include "nijlin/field/bigfloat.hpp"
#include "nijlin/field/rational.hpp"

namespace nijlin {

/// A coefficient field usable by Series and everything built on it. Each
/// instantiation supplies a Context that manufactures constants at the right
/// precision, so generic code never has to guess a float width.
template <class F>
concept Coefficient = std::copyable<F> && requires(const F a, const F b, const typename F::Context ctx) {
  { a + b } -> std::same_as<F>;
  { a - b } -> std::same_as<F>;
  { a * b } -> std::same_as<F>;
  { a / b } -> std::same_as<F>;
  { -a } -> std::same_as<F>;
  { a == b } -> std::convertible_to<bool>;
  { a < b } -> std::convertible_to<bool>;
  { a.is_zero() } -> std::convertible_to<bool>;
  { a.sign() } -> std::convertible_to<int>;
  { a.abs() } -> std::same_as<F>;
  { a.to_double() } -> std::convertible_to<double>;
  { a.str() } -> std::convertible_to<std::string>;
  { a.context() } -> std::same_as<typename F::Context>;
  { ctx.make(1L) } -> std::same_as<F>;
  { ctx.make(Rational()) } -> std::same_as<F>;
  { ctx.zero_tolerance() } -> std::same_as<F>;
  { ctx.name() } -> std::convertible_to<std::string>;
};

static_assert(Coefficient<Rational>);
static_assert(Coefficient<BigFloat>);

/// True for fields whose arithmetic is exact.
template <class F>
inline constexpr bool is_exact_field = std::same_as<F, Rational>;

/// Zero for exact fields; below the context's round-off tolerance for floats.
template <Coefficient F>
bool negligible(const F& x) {
  if constexpr (is_exact_field<F>) {
    return x.is_zero();
  } else {
    return x.abs() <= x.context().zero_tolerance();
  }
}

}  // namespace nijlin
