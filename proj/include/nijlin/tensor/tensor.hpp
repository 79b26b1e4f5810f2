#pragma once

#include <optional>
#include <vector>

#include "nijlin/series/change.hpp"
#include "nijlin/series/series.hpp"
#include "nijlin/tensor/linear.hpp"

namespace nijlin {

/// Vector field with Series components sharing variables and truncation.
template <Coefficient F>
class VectorField {
 public:
  using S = Series<F>;

  explicit VectorField(std::vector<S> components);
  /// The coordinate field ∂_i.
  static VectorField coordinate(const VarList& vars, int truncation, std::size_t i, typename F::Context ctx = {});

  std::size_t dim() const { return c_.size(); }
  const S& operator[](std::size_t k) const { return c_[k]; }
  const std::vector<S>& components() const { return c_; }
  const VarList& vars() const { return c_.front().vars(); }
  int truncation() const { return c_.front().truncation(); }

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  std::vector<S> c_;
};

/// (1,1)-tensor field. Entry (k, i) is R^k_i: row = output component, so the
/// i-th column is R ∂_i. Carries the degree through which its entries are
/// trustworthy; derived operators inherit the minimum of their inputs.
template <Coefficient F>
class OperatorField {
 public:
  using S = Series<F>;

  /// `rows[k][i]` = R^k_i.
  explicit OperatorField(std::vector<std::vector<S>> rows, std::optional<int> reliable = std::nullopt);

  static OperatorField zero(const VarList& vars, int truncation, typename F::Context ctx = {});
  static OperatorField scalar(const VarList& vars, int truncation, const F& lambda);
  static OperatorField identity(const VarList& vars, int truncation, typename F::Context ctx = {});

  std::size_t dim() const { return n_; }
  const VarList& vars() const { return e_.front().vars(); }
  int truncation() const { return e_.front().truncation(); }
  const typename F::Context& context() const { return e_.front().context(); }
  int reliable_degree() const { return reliable_; }
  OperatorField with_reliable_degree(int d) const;

  const S& operator()(std::size_t k, std::size_t i) const { return e_[k * n_ + i]; }
  std::vector<std::vector<S>> rows() const;

  VectorField<F> apply(const VectorField<F>& xi) const;
  /// R ∂_i.
  VectorField<F> column(std::size_t i) const;

  OperatorField operator+(const OperatorField& o) const;
  OperatorField operator-(const OperatorField& o) const;
  /// Matrix product (R Q)^k_i = Σ_j R^k_j Q^j_i.
  OperatorField operator*(const OperatorField& o) const;
  OperatorField scaled(const F& c) const;

  /// Entries restricted to total degree k.
  OperatorField homogeneous_part(int k) const;
  OperatorField truncated_to(int k) const;
  OperatorField with_truncation(int n) const;
  /// Value of each entry at a point (entries treated as polynomials).
  Matrix<F> evaluate(std::span<const F> point) const;

  S trace() const;
  /// Two-dimensional only.
  S determinant() const;

  /// Entry-wise equality; reliable degree is bookkeeping and not compared.
  friend bool operator==(const OperatorField& a, const OperatorField& b) { return a.e_ == b.e_; }

 private:
  OperatorField(std::size_t n, std::vector<S> entries, int reliable)
      : n_(n), e_(std::move(entries)), reliable_(reliable) {}

  std::size_t n_;
  std::vector<S> e_;
  int reliable_;
};

/// Vector-valued two-form T^k_{ij}, antisymmetric in (i, j).
template <Coefficient F>
class TwoFormValued {
 public:
  using S = Series<F>;

  TwoFormValued(std::size_t n, const VarList& vars, int truncation, int reliable, typename F::Context ctx = {});

  std::size_t dim() const { return n_; }
  int reliable_degree() const { return reliable_; }
  const S& operator()(std::size_t k, std::size_t i, std::size_t j) const { return t_[(k * n_ + i) * n_ + j]; }
  /// Sets T^k_{ij} and T^k_{ji} = −value. Requires i ≠ j.
  void set(std::size_t k, std::size_t i, std::size_t j, const S& value);

  TwoFormValued operator-(const TwoFormValued& o) const;
  TwoFormValued scaled(const F& c) const;
  TwoFormValued homogeneous_part(int d) const;
  TwoFormValued truncated_to(int d) const;
  bool is_zero() const;

  friend bool operator==(const TwoFormValued& a, const TwoFormValued& b) { return a.t_ == b.t_; }

 private:
  std::size_t n_;
  int reliable_;
  std::vector<S> t_;
};

template <Coefficient F>
VectorField<F> lie_bracket(const VectorField<F>& xi, const VectorField<F>& eta);

/// N_R(ξ, η) = R[Rξ, η] + R[ξ, Rη] − [Rξ, Rη] − R²[ξ, η] on coordinate pairs.
template <Coefficient F>
TwoFormValued<F> nijenhuis_torsion(const OperatorField<F>& R);

/// Frölicher–Nijenhuis bracket [[R, Q]] on coordinate pairs.
template <Coefficient F>
TwoFormValued<F> fn_bracket(const OperatorField<F>& R, const OperatorField<F>& Q);

/// The operator in the coordinates x̄ = φ(x): R̄(x̄) = J R J⁻¹ evaluated at
/// x = φ⁻¹(x̄), J the Jacobian of φ.
template <Coefficient F>
OperatorField<F> transform_operator(const OperatorField<F>& R, const FormalChange<F>& phi);

/// Tensor transport of a (1,2)-tensor under the same rule.
template <Coefficient F>
TwoFormValued<F> transport_two_form(const TwoFormValued<F>& T, const FormalChange<F>& phi);

/// Linear change x̄ = P x: R̄(x̄) = P R(P⁻¹ x̄) P⁻¹.
template <Coefficient F>
OperatorField<F> apply_linear_change(const OperatorField<F>& R, const Matrix<F>& P);

/// Jacobian matrix of a map, entry (k, i) = ∂φ^k/∂x^i.
template <Coefficient F>
OperatorField<F> jacobian(const std::vector<Series<F>>& map);

struct TorsionWitness {
  int degree;
  std::size_t i, j, k;
  std::string coefficient;
};

struct NijenhuisCheck {
  bool nijenhuis;
  int checked_through;
  std::optional<TorsionWitness> witness;
};

/// Checks the torsion through `through_degree` (at most the reliable degree
/// of the torsion, N − 1 for input truncated at N). The witness is the first
/// nonzero T^k_{ij} in degree order.
template <Coefficient F>
NijenhuisCheck is_nijenhuis(const OperatorField<F>& R, int through_degree);

template <Coefficient F>
NijenhuisCheck torsion_check(const TwoFormValued<F>& torsion, int through_degree);

extern template class VectorField<Rational>;
extern template class VectorField<BigFloat>;
extern template class OperatorField<Rational>;
extern template class OperatorField<BigFloat>;
extern template class TwoFormValued<Rational>;
extern template class TwoFormValued<BigFloat>;

}  // namespace nijlin
