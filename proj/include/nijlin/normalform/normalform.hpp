#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nijlin/lsa/lsa.hpp"
#include "nijlin/series/change.hpp"
#include "nijlin/tensor/tensor.hpp"

namespace nijlin {

/// Degree-k part of R − λ₀·Id in the layout [[a, b], [c, d]].
template <Coefficient F>
struct DegreeSlice {
  int k;
  Series<F> a, b, c, d;
};

template <Coefficient F>
DegreeSlice<F> slice_of(const OperatorField<F>& R, int k);

/// (u d_u − u c_v + u a_u + α v a_v,  α v d_u + u c_u + (1 − α) c).
template <Coefficient F>
std::pair<Series<F>, Series<F>> base_equations_residual(const DegreeSlice<F>& s, const F& alpha);

/// i + 1 + α(k − i − 1), the factor met by c_i u^i v^{k−i}.
template <Coefficient F>
F normalization_factor(int k, int i, const F& alpha) {
  const auto ctx = alpha.context();
  return ctx.make(static_cast<long>(i + 1)) + alpha * ctx.make(static_cast<long>(k - i - 1));
}

enum class ObstructionKind { Resonance, SmallDivisor };
std::string to_string(ObstructionKind k);

/// One factor met while solving a degree: the monomial x^m y^n (m = i,
/// n = k − i for normalization; λ^m μ^n for linearization), the factor and
/// the coefficient it multiplies. `active` marks a nonzero coefficient.
template <Coefficient F>
struct FactorRecord {
  int degree;
  int m;
  int n;
  F factor;
  double magnitude;
  F numerator;
  bool active;
};

template <Coefficient F>
struct Obstruction {
  ObstructionKind kind;
  int degree;
  int m;
  int n;
  F factor;
  /// Every factor at the obstructed degree, not only the first bad one.
  std::vector<FactorRecord<F>> factors;
  std::string message;
};

/// Floors for float mode. A factor below `hard_floor` is a resonance; one
/// below `divisor_floor` is a small divisor. Both are ignored in rational
/// mode, where only exact zeros count.
struct DivisorPolicy {
  /// log₂ of the small-divisor floor.
  long divisor_floor_log2 = -128;
  /// log₂ of the hard floor, relative to the working precision: the floor
  /// is 2^-(bits − hard_floor_margin).
  long hard_floor_margin = 16;
};

template <Coefficient F>
struct DegreeDiagnostics {
  int degree;
  /// Exponents (i, k − i) of the monomials removed from a.
  std::vector<std::pair<int, int>> removed;
  /// Coefficients a_i / i used in g.
  std::vector<F> g_coefficients;
  std::vector<FactorRecord<F>> factors;
  double min_abs_factor;
};

template <Coefficient F>
struct DegreeStep {
  FormalChange<F> change;
  OperatorField<F> R;
  DegreeDiagnostics<F> diagnostics;
  std::optional<Obstruction<F>> obstruction;
};

/// One step of the normalization: R must be λ₀·Id + [[0, u], [0, αv]] +
/// L₂ + … + L_{k−1} + R_k + …. Chooses g from a, applies v̄ = v + g (f = 0),
/// then reads c and d off the torsion condition. Throws NotNijenhuisError
/// when the slice contradicts the base equations and DomainError when R is
/// not in the required form.
template <Coefficient F>
DegreeStep<F> normalize_degree(const OperatorField<F>& R, const F& alpha, int k, DivisorPolicy policy = {});

template <Coefficient F>
struct NormalFormResult {
  F lambda0;
  /// Linear change x̄ = P x bringing the linear part to template form.
  Matrix<F> linear;
  /// Tower of degree-k changes applied after `linear`.
  FormalChange<F> change;
  OperatorField<F> R;
  /// Upper-right and lower-right entries of R − λ₀·Id.
  Series<F> p, q;
  std::vector<DegreeDiagnostics<F>> degrees;
  std::optional<Obstruction<F>> obstruction;
};

/// Identifies the linear part (must be b_{1,α} with the given α), moves it
/// to template form, and runs normalize_degree for k = 2 … N.
template <Coefficient F>
NormalFormResult<F> normal_form(const OperatorField<F>& R, const F& alpha, int N, DivisorPolicy policy = {});

/// μ = v + … with det(R − λ₀·Id − αμ·Id) = 0, solved degree by degree in
/// the given coordinates (μ's linear part is tr R₁ / α). Truncation of R.
template <Coefficient F>
Series<F> eigen_coordinate(const OperatorField<F>& R, const F& alpha);

template <Coefficient F>
struct TriangularForm {
  F lambda0;
  Matrix<F> linear;
  /// (u, v) ↦ (λ, μ) = (u, μ(u, v)) after `linear`.
  FormalChange<F> change;
  OperatorField<F> R;
  Series<F> h;
};

/// Coordinates λ = first coordinate, μ = eigen_coordinate, after moving the
/// linear part to template form. Throws DomainError if the result is not
/// of the form λ₀·Id + [[0, h], [0, αμ]].
template <Coefficient F>
TriangularForm<F> to_triangular_form(const OperatorField<F>& R, const F& alpha);

template <Coefficient F>
struct Linearization {
  /// Forward map (λ, μ) ↦ (x, y) = (g, μ).
  std::vector<Series<F>> forward;
  Series<F> g;
  /// m + αn − 1 for every monomial λ^m μ^n of degree 2 … N.
  std::vector<FactorRecord<F>> divisors;
  std::optional<Obstruction<F>> obstruction;
  double min_abs_divisor;
  int min_m, min_n;
};

/// Solves h g_λ + αμ g_μ = g for g = λ + …, dividing by m + αn − 1.
template <Coefficient F>
Linearization<F> linearize_triangular(const Series<F>& h, const F& alpha, int N, DivisorPolicy policy = {});

/// The triangular change as a FormalChange (this inverts the forward map,
/// which is costly at high degree).
template <Coefficient F>
FormalChange<F> linearizing_change(const Linearization<F>& lin) {
  return FormalChange<F>::from_forward(lin.forward);
}

}  // namespace nijlin
