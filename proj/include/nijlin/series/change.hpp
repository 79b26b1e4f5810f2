#pragma once

#include <vector>

#include "nijlin/series/series.hpp"

namespace nijlin {

/// A formal coordinate change x̄ = φ(x) tangent to the identity, kept both as
/// a list of steps and as composed forward/inverse maps truncated at N.
///
/// Steps apply in list order: the forward map is step_last ∘ … ∘ step_first,
/// each step being x ↦ x + parts.
template <Coefficient F>
class FormalChange {
 public:
  using S = Series<F>;

  struct Step {
    int degree;
    std::vector<S> parts;
  };

  static FormalChange identity(const VarList& vars, int truncation, typename F::Context ctx = {});
  /// The single step x ↦ x + parts, parts homogeneous of `degree` ≥ 2.
  static FormalChange from_step(int degree, std::vector<S> parts);
  /// Takes an arbitrary forward map id + (degree ≥ 2) and factors it into
  /// homogeneous steps of increasing degree. Throws DomainError when the
  /// map is not tangent to the identity.
  static FormalChange from_forward(std::vector<S> forward);

  std::size_t dim() const { return forward_.size(); }
  const VarList& vars() const { return forward_.front().vars(); }
  int truncation() const { return forward_.front().truncation(); }
  const std::vector<Step>& steps() const { return steps_; }
  const std::vector<S>& forward() const { return forward_; }
  const std::vector<S>& inverse() const { return inverse_; }
  bool is_identity() const;

  /// First this, then `next`.
  FormalChange then(const FormalChange& next) const;
  /// The inverse change, refactored into steps.
  FormalChange inverted() const;

 private:
  FormalChange(std::vector<Step> steps, std::vector<S> forward, std::vector<S> inverse)
      : steps_(std::move(steps)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

  std::vector<Step> steps_;
  std::vector<S> forward_;
  std::vector<S> inverse_;
};

/// Formal inverse of a map id + (degree ≥ 2), up to the truncation order.
template <Coefficient F>
std::vector<Series<F>> invert_map(const std::vector<Series<F>>& forward);

/// Same as FormalChange::inverted().
template <Coefficient F>
FormalChange<F> invert_change(const FormalChange<F>& phi) {
  return phi.inverted();
}

/// Throws DomainError unless `map` is x + (terms of degree ≥ 2).
template <Coefficient F>
void require_tangent_to_identity(const std::vector<Series<F>>& map);

extern template class FormalChange<Rational>;
extern template class FormalChange<BigFloat>;

}  // namespace nijlin
