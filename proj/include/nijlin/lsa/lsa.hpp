#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nijlin/brjuno/brjuno.hpp"
#include "nijlin/tensor/tensor.hpp"

namespace nijlin {

/// Structure constants a^k_{ij} of an n-dimensional algebra, with
/// (e_i ⋆ e_j)^k = a^k_{ij}.
template <Coefficient F>
class Lsa {
 public:
  using Vec = std::vector<F>;

  Lsa(std::size_t n, typename F::Context ctx = {});
  /// `table[k][i][j]` = a^k_{ij}.
  explicit Lsa(const std::vector<std::vector<std::vector<F>>>& table);

  std::size_t dim() const { return n_; }
  const typename F::Context& context() const { return ctx_; }
  const F& operator()(std::size_t k, std::size_t i, std::size_t j) const { return a_[(k * n_ + i) * n_ + j]; }
  void set(std::size_t k, std::size_t i, std::size_t j, const F& v) { a_[(k * n_ + i) * n_ + j] = v; }
  std::vector<std::vector<std::vector<F>>> table() const;

  Vec product(const Vec& x, const Vec& y) const;
  Vec basis_vector(std::size_t i) const;
  bool is_zero() const;
  /// max |a^k_{ij}| as a double.
  double scale() const;

  /// Structure constants in the basis b_i = Σ_k W^k_i e_k (columns of W).
  Lsa in_basis(const Matrix<F>& W) const;
  Lsa scaled(const F& c) const;

  friend bool operator==(const Lsa&, const Lsa&) = default;

 private:
  std::size_t n_;
  typename F::Context ctx_;
  std::vector<F> a_;
};

/// Default coordinate names: x, y for n = 2, x1 … xn otherwise.
VarList default_vars(std::size_t n);

/// a^k_{ij} = ∂R^k_i/∂x^j at the basepoint (origin when empty). Throws
/// DomainError unless R(basepoint) is a multiple of the identity.
template <Coefficient F>
Lsa<F> extract_linear_lsa(const OperatorField<F>& R, std::span<const F> basepoint = {});

/// λ₀ with R(basepoint) = λ₀·Id; DomainError when the value is not scalar.
template <Coefficient F>
F scalar_part(const OperatorField<F>& R, std::span<const F> basepoint = {});

/// Relative tolerance for float-mode zero tests. Values are measured after
/// the algebra is rescaled to max |a^k_{ij}| = 1. Exact fields ignore it.
struct Tolerance {
  double relative = 1e-12;
};

struct LeftSymmetryCheck {
  bool left_symmetric;
  /// First basis triple (i, j, k) with 𝒜(e_i, e_j, e_k) ≠ 𝒜(e_j, e_i, e_k).
  std::optional<std::array<std::size_t, 3>> violation;
  double max_defect;
};

/// 𝒜(ξ, η, ζ) = (ξ⋆η)⋆ζ − ξ⋆(η⋆ζ) checked for symmetry in ξ, η on every
/// basis triple.
template <Coefficient F>
LeftSymmetryCheck check_left_symmetric(const Lsa<F>& A, Tolerance tol = {});

template <Coefficient F>
struct LieInfo {
  /// c^k_{ij} = a^k_{ij} − a^k_{ji}.
  Lsa<F> c;
  bool jacobi;
  bool abelian;
  std::optional<std::array<std::size_t, 3>> jacobi_violation;
};

template <Coefficient F>
LieInfo<F> associated_lie(const Lsa<F>& A, Tolerance tol = {});

/// R^k_i(x) = Σ_j a^k_{ij} x^j.
template <Coefficient F>
OperatorField<F> operator_of_lsa(const Lsa<F>& A, const VarList& vars, int truncation);
template <Coefficient F>
OperatorField<F> operator_of_lsa(const Lsa<F>& A, int truncation = 1) {
  return operator_of_lsa(A, default_vars(A.dim()), truncation);
}

enum class Family { b1, b2, b3, b4plus, b4minus, b5, c0, c2, c3, c4, c5plus, c5minus };

std::string to_string(Family f);
const std::vector<Family>& all_families();
bool has_parameter(Family f);

/// A point of the two-dimensional list: family plus α (b1) or β (b2).
struct ClassLabel {
  Family family;
  std::optional<Alpha> param;
  /// Set when the input spelled the zero algebra `c1`.
  bool c1_alias = false;

  /// `b1:-2/3`, `b2:3`, `c5plus` …
  std::string str() const;
  /// Accepts the canonical tags, `b4+`/`b4-`/`c5+`/`c5-`, and `c1` as an
  /// alias of `c0`. Parameters follow a colon; `alpha=`/`beta=` may prefix
  /// them. Throws ParseError.
  static ClassLabel parse(std::string_view text, std::optional<mpfr_prec_t> float_bits = std::nullopt);
};

/// Same family and, where present, the same parameter (exact comparison for
/// rationals, text comparison otherwise).
bool same_label(const ClassLabel& a, const ClassLabel& b);

/// The template operator, linear in the coordinates. Parameters must be
/// representable in F (a continued fraction is evaluated in float mode and
/// rejected in rational mode).
template <Coefficient F>
OperatorField<F> template_operator(const ClassLabel& label, const VarList& vars, int truncation,
                                   typename F::Context ctx = {});
template <Coefficient F>
Lsa<F> template_lsa(const ClassLabel& label, typename F::Context ctx = {});

/// Converts a label parameter to F.
template <Coefficient F>
F param_value(const Alpha& a, const typename F::Context& ctx);

enum class IdentifyStatus { Identified, NotLeftSymmetric, UnclassifiedAtTolerance };
std::string to_string(IdentifyStatus s);

template <Coefficient F>
struct Identification {
  IdentifyStatus status;
  std::optional<ClassLabel> label;
  /// Columns are the template basis in the original coordinates, so that
  /// A.in_basis(witness) is the template table.
  std::optional<Matrix<F>> witness;
  /// P = witness⁻¹: the linear change x̄ = P x taking operator_of_lsa(A) to
  /// the template operator.
  std::optional<Matrix<F>> change;
  /// Conjugation re-checked against the template (exactly, or within
  /// √tolerance after rescaling in float mode).
  bool verified = false;
  double residual = 0.0;
  double tolerance = 0.0;
  /// tr R(x) = τ₀ x + τ₁ y and det R(x) = d₀ x² + d₁ xy + d₂ y².
  std::vector<F> trace_form;
  std::vector<F> det_form;
  std::optional<std::array<std::size_t, 3>> violation;
  std::string note;
};

/// Two-dimensional identification by a decision tree on the associated Lie
/// algebra, units, annihilators and the derived ideal, followed by a
/// conjugation check of the witness.
template <Coefficient F>
Identification<F> identify_2d(const Lsa<F>& A, Tolerance tol = {});

enum class Category { Smooth, Analytic };
enum class Outcome { Degenerate, Nondegenerate, Unknown };
std::string to_string(Category c);
std::string to_string(Outcome o);
Category parse_category(std::string_view text);

struct Verdict {
  ClassLabel label;
  Category category;
  Outcome outcome;
  std::string evidence;
  std::optional<SigmaFlags> sigma;
  std::optional<BrjunoCertificate> certificate;
};

/// Table lookup for the two-dimensional list, including degeneracy of
/// b_{1,α} for negative irrational non-Brjuno α in the analytic category.
/// Throws DomainError when that case arrives without a certificate.
Verdict degeneracy_verdict(const ClassLabel& label, Category category,
                           const std::optional<BrjunoCertificate>& alpha_class = std::nullopt);

extern template class Lsa<Rational>;
extern template class Lsa<BigFloat>;

}  // namespace nijlin
