#include "nijlin/tensor/tensor.hpp"

#include <algorithm>

#include "nijlin/error.hpp"

namespace nijlin {

// ------------------------------------------------------------ VectorField

template <Coefficient F>
VectorField<F>::VectorField(std::vector<S> components) : c_(std::move(components)) {
  if (c_.empty()) throw DomainError("vector field of dimension zero");
  for (const auto& s : c_) s.require_compatible(c_.front());
}

template <Coefficient F>
VectorField<F> VectorField<F>::coordinate(const VarList& vars, int truncation, std::size_t i,
                                          typename F::Context ctx) {
  std::vector<S> c(vars.size(), S(vars, truncation, ctx));
  c.at(i) = S::constant(vars, truncation, ctx.make(1L));
  return VectorField(std::move(c));
}

template <Coefficient F>
VectorField<F> lie_bracket(const VectorField<F>& xi, const VectorField<F>& eta) {
  if (xi.dim() != eta.dim() || xi.dim() != xi.vars().size()) {
    throw MismatchError("vector fields of different dimension");
  }
  xi[0].require_compatible(eta[0]);
  std::vector<Series<F>> out;
  for (std::size_t k = 0; k < xi.dim(); ++k) {
    Series<F> c(xi.vars(), xi.truncation(), xi[0].context());
    for (std::size_t j = 0; j < xi.dim(); ++j) {
      if (!xi[j].is_zero()) c += xi[j] * eta[k].derivative(j);
      if (!eta[j].is_zero()) c -= eta[j] * xi[k].derivative(j);
    }
    out.push_back(std::move(c));
  }
  return VectorField<F>(std::move(out));
}

// ----------------------------------------------------------- OperatorField

template <Coefficient F>
OperatorField<F>::OperatorField(std::vector<std::vector<S>> rows, std::optional<int> reliable) : n_(rows.size()) {
  if (n_ == 0) throw DomainError("operator field of dimension zero");
  for (auto& row : rows) {
    if (row.size() != n_) throw MismatchError("operator field must be square");
    for (auto& s : row) e_.push_back(std::move(s));
  }
  for (const auto& s : e_) s.require_compatible(e_.front());
  if (e_.front().nvars() != n_) throw MismatchError("operator dimension differs from the number of variables");
  reliable_ = std::min(reliable.value_or(truncation()), truncation());
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::zero(const VarList& vars, int truncation, typename F::Context ctx) {
  const std::size_t n = vars.size();
  return OperatorField(n, std::vector<S>(n * n, S(vars, truncation, ctx)), truncation);
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::scalar(const VarList& vars, int truncation, const F& lambda) {
  auto r = zero(vars, truncation, lambda.context());
  for (std::size_t i = 0; i < r.n_; ++i) r.e_[i * r.n_ + i] = S::constant(vars, truncation, lambda);
  return r;
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::identity(const VarList& vars, int truncation, typename F::Context ctx) {
  return scalar(vars, truncation, ctx.make(1L));
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::with_reliable_degree(int d) const {
  return OperatorField(n_, e_, std::min(d, truncation()));
}

template <Coefficient F>
std::vector<std::vector<Series<F>>> OperatorField<F>::rows() const {
  std::vector<std::vector<S>> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k].assign(e_.begin() + k * n_, e_.begin() + (k + 1) * n_);
  return out;
}

template <Coefficient F>
VectorField<F> OperatorField<F>::apply(const VectorField<F>& xi) const {
  if (xi.dim() != n_) throw MismatchError("operator and vector field dimensions differ");
  std::vector<S> out;
  for (std::size_t k = 0; k < n_; ++k) {
    S c(vars(), truncation(), context());
    for (std::size_t i = 0; i < n_; ++i) {
      if (!xi[i].is_zero() && !(*this)(k, i).is_zero()) c += (*this)(k, i) * xi[i];
    }
    out.push_back(std::move(c));
  }
  return VectorField<F>(std::move(out));
}

template <Coefficient F>
VectorField<F> OperatorField<F>::column(std::size_t i) const {
  std::vector<S> out;
  for (std::size_t k = 0; k < n_; ++k) out.push_back((*this)(k, i));
  return VectorField<F>(std::move(out));
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::operator+(const OperatorField& o) const {
  if (o.n_ != n_) throw MismatchError("operator fields of different dimension");
  std::vector<S> e = e_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.e_[i];
  return OperatorField(n_, std::move(e), std::min(reliable_, o.reliable_));
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::operator-(const OperatorField& o) const {
  if (o.n_ != n_) throw MismatchError("operator fields of different dimension");
  std::vector<S> e = e_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= o.e_[i];
  return OperatorField(n_, std::move(e), std::min(reliable_, o.reliable_));
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::operator*(const OperatorField& o) const {
  if (o.n_ != n_) throw MismatchError("operator fields of different dimension");
  std::vector<S> e;
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) {
      S c(vars(), truncation(), context());
      for (std::size_t j = 0; j < n_; ++j) {
        if (!(*this)(k, j).is_zero() && !o(j, i).is_zero()) c += (*this)(k, j) * o(j, i);
      }
      e.push_back(std::move(c));
    }
  }
  return OperatorField(n_, std::move(e), std::min(reliable_, o.reliable_));
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::scaled(const F& c) const {
  std::vector<S> e;
  for (const auto& s : e_) e.push_back(s.scaled(c));
  return OperatorField(n_, std::move(e), reliable_);
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::homogeneous_part(int k) const {
  std::vector<S> e;
  for (const auto& s : e_) e.push_back(s.homogeneous_part(k));
  return OperatorField(n_, std::move(e), reliable_);
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::truncated_to(int k) const {
  std::vector<S> e;
  for (const auto& s : e_) e.push_back(s.truncated_to(k));
  return OperatorField(n_, std::move(e), reliable_);
}

template <Coefficient F>
OperatorField<F> OperatorField<F>::with_truncation(int n) const {
  std::vector<S> e;
  for (const auto& s : e_) e.push_back(s.with_truncation(n));
  return OperatorField(n_, std::move(e), std::min(reliable_, n));
}

template <Coefficient F>
Matrix<F> OperatorField<F>::evaluate(std::span<const F> point) const {
  Matrix<F> m(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) m[k].push_back((*this)(k, i).evaluate(point));
  }
  return m;
}

template <Coefficient F>
Series<F> OperatorField<F>::trace() const {
  S t(vars(), truncation(), context());
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

template <Coefficient F>
Series<F> OperatorField<F>::determinant() const {
  if (n_ != 2) throw DomainError("determinant is implemented for dimension two only");
  return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
}

// ----------------------------------------------------------- TwoFormValued

template <Coefficient F>
TwoFormValued<F>::TwoFormValued(std::size_t n, const VarList& vars, int truncation, int reliable,
                                typename F::Context ctx)
    : n_(n), reliable_(reliable), t_(n * n * n, S(vars, truncation, ctx)) {}

template <Coefficient F>
void TwoFormValued<F>::set(std::size_t k, std::size_t i, std::size_t j, const S& value) {
  if (i == j) throw DomainError("a two-form has no diagonal entries");
  t_[(k * n_ + i) * n_ + j] = value;
  t_[(k * n_ + j) * n_ + i] = -value;
}

template <Coefficient F>
TwoFormValued<F> TwoFormValued<F>::operator-(const TwoFormValued& o) const {
  if (o.n_ != n_) throw MismatchError("two-forms of different dimension");
  TwoFormValued r = *this;
  r.reliable_ = std::min(reliable_, o.reliable_);
  for (std::size_t i = 0; i < t_.size(); ++i) r.t_[i] -= o.t_[i];
  return r;
}

template <Coefficient F>
TwoFormValued<F> TwoFormValued<F>::scaled(const F& c) const {
  TwoFormValued r = *this;
  for (auto& s : r.t_) s = s.scaled(c);
  return r;
}

template <Coefficient F>
TwoFormValued<F> TwoFormValued<F>::homogeneous_part(int d) const {
  TwoFormValued r = *this;
  for (auto& s : r.t_) s = s.homogeneous_part(d);
  return r;
}

template <Coefficient F>
TwoFormValued<F> TwoFormValued<F>::truncated_to(int d) const {
  TwoFormValued r = *this;
  for (auto& s : r.t_) s = s.truncated_to(d);
  return r;
}

template <Coefficient F>
bool TwoFormValued<F>::is_zero() const {
  return std::all_of(t_.begin(), t_.end(), [](const S& s) { return s.is_zero(); });
}

// ------------------------------------------------------------- brackets

namespace {

template <Coefficient F>
VectorField<F> vf_sum(std::initializer_list<std::pair<int, VectorField<F>>> terms) {
  std::vector<Series<F>> out = terms.begin()->second.components();
  for (auto& c : out) c = c.scaled(c.context().make(0L));
  for (const auto& [sign, v] : terms) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (sign > 0) {
        out[k] += v[k];
      } else {
        out[k] -= v[k];
      }
    }
  }
  return VectorField<F>(std::move(out));
}

}  // namespace

template <Coefficient F>
TwoFormValued<F> nijenhuis_torsion(const OperatorField<F>& R) {
  const std::size_t n = R.dim();
  TwoFormValued<F> T(n, R.vars(), R.truncation(), R.reliable_degree() - 1, R.context());
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = VectorField<F>::coordinate(R.vars(), R.truncation(), i, R.context());
    const auto Rdi = R.column(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto dj = VectorField<F>::coordinate(R.vars(), R.truncation(), j, R.context());
      const auto Rdj = R.column(j);
      const auto v = vf_sum<F>({{+1, R.apply(lie_bracket(Rdi, dj))},
                                {+1, R.apply(lie_bracket(di, Rdj))},
                                {-1, lie_bracket(Rdi, Rdj)}});
      for (std::size_t k = 0; k < n; ++k) T.set(k, i, j, v[k]);
    }
  }
  return T;
}

template <Coefficient F>
TwoFormValued<F> fn_bracket(const OperatorField<F>& R, const OperatorField<F>& Q) {
  if (R.dim() != Q.dim()) throw MismatchError("operator fields of different dimension");
  R(0, 0).require_compatible(Q(0, 0));
  const std::size_t n = R.dim();
  TwoFormValued<F> T(n, R.vars(), R.truncation(), std::min(R.reliable_degree(), Q.reliable_degree()) - 1,
                     R.context());
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = VectorField<F>::coordinate(R.vars(), R.truncation(), i, R.context());
    const auto Rdi = R.column(i);
    const auto Qdi = Q.column(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto dj = VectorField<F>::coordinate(R.vars(), R.truncation(), j, R.context());
      const auto Rdj = R.column(j);
      const auto Qdj = Q.column(j);
      // [∂_i, ∂_j] = 0 removes the RQ and QR terms.
      const auto v = vf_sum<F>({{+1, Q.apply(lie_bracket(Rdi, dj))},
                                {+1, R.apply(lie_bracket(di, Qdj))},
                                {-1, lie_bracket(Rdi, Qdj)},
                                {+1, R.apply(lie_bracket(Qdi, dj))},
                                {+1, Q.apply(lie_bracket(di, Rdj))},
                                {-1, lie_bracket(Qdi, Rdj)}});
      for (std::size_t k = 0; k < n; ++k) T.set(k, i, j, v[k]);
    }
  }
  return T;
}

// ------------------------------------------------------ coordinate changes

template <Coefficient F>
OperatorField<F> jacobian(const std::vector<Series<F>>& map) {
  std::vector<std::vector<Series<F>>> rows;
  for (const auto& f : map) {
    std::vector<Series<F>> row;
    for (std::size_t i = 0; i < map.size(); ++i) row.push_back(f.derivative(i));
    rows.push_back(std::move(row));
  }
  return OperatorField<F>(std::move(rows));
}

namespace {

// (I + K)⁻¹ = Σ (−K)^m; K has no constant term, so the sum is finite.
template <Coefficient F>
OperatorField<F> inverse_jacobian(const OperatorField<F>& J) {
  const auto I = OperatorField<F>::identity(J.vars(), J.truncation(), J.context());
  const auto minus_k = (I - J);
  for (std::size_t k = 0; k < J.dim(); ++k) {
    for (std::size_t i = 0; i < J.dim(); ++i) {
      if (!minus_k(k, i).constant_term().is_zero()) throw DomainError("Jacobian is not the identity at the origin");
    }
  }
  auto sum = I;
  auto power = I;
  for (int m = 1; m <= J.truncation() + 1; ++m) {
    power = power * minus_k;
    if (power == OperatorField<F>::zero(J.vars(), J.truncation(), J.context())) break;
    sum = sum + power;
  }
  return sum;
}

template <Coefficient F>
std::vector<Series<F>> substitute_all(const std::vector<Series<F>>& entries, const std::vector<Series<F>>& args) {
  return compose_many<F>(entries, args);
}

}  // namespace

template <Coefficient F>
OperatorField<F> transform_operator(const OperatorField<F>& R, const FormalChange<F>& phi) {
  if (phi.dim() != R.dim()) throw MismatchError("coordinate change and operator differ in dimension");
  if (phi.truncation() != R.truncation()) throw MismatchError("coordinate change and operator differ in truncation");
  if (phi.is_identity()) return R;
  const auto J = jacobian(phi.forward());
  const auto Jinv = inverse_jacobian(J);
  const auto M = J * R * Jinv;
  std::vector<Series<F>> flat;
  for (const auto& row : M.rows()) flat.insert(flat.end(), row.begin(), row.end());
  auto moved = substitute_all(flat, phi.inverse());
  std::vector<std::vector<Series<F>>> rows(R.dim());
  for (std::size_t k = 0; k < R.dim(); ++k) {
    rows[k].assign(moved.begin() + k * R.dim(), moved.begin() + (k + 1) * R.dim());
  }
  return OperatorField<F>(std::move(rows), R.reliable_degree());
}

template <Coefficient F>
TwoFormValued<F> transport_two_form(const TwoFormValued<F>& T, const FormalChange<F>& phi) {
  const std::size_t n = T.dim();
  if (phi.dim() != n) throw MismatchError("coordinate change and tensor differ in dimension");
  const auto J = jacobian(phi.forward());
  const auto Jinv = inverse_jacobian(J);
  const auto& vars = phi.vars();
  const int N = phi.truncation();
  const auto ctx = phi.forward().front().context();
  TwoFormValued<F> out(n, vars, N, T.reliable_degree(), ctx);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        Series<F> s(vars, N, ctx);
        for (std::size_t a = 0; a < n; ++a) {
          if (J(k, a).is_zero()) continue;
          for (std::size_t b = 0; b < n; ++b) {
            if (Jinv(b, i).is_zero()) continue;
            for (std::size_t c = 0; c < n; ++c) {
              if (b == c || Jinv(c, j).is_zero() || T(a, b, c).is_zero()) continue;
              s += J(k, a) * T(a, b, c) * Jinv(b, i) * Jinv(c, j);
            }
          }
        }
        out.set(k, i, j, compose<F>(s, phi.inverse()));
      }
    }
  }
  return out;
}

template <Coefficient F>
OperatorField<F> apply_linear_change(const OperatorField<F>& R, const Matrix<F>& P) {
  const std::size_t n = R.dim();
  if (P.size() != n) throw MismatchError("change-of-basis matrix has the wrong size");
  const auto Pinv = matrix_inverse(P);
  const auto& vars = R.vars();
  const int N = R.truncation();
  const auto ctx = R.context();
  // x = P⁻¹ x̄ as series in x̄.
  std::vector<Series<F>> args;
  for (std::size_t a = 0; a < n; ++a) {
    Series<F> s(vars, N, ctx);
    for (std::size_t b = 0; b < n; ++b) s.add_term(Monomial::unit(n, b), Pinv[a][b]);
    args.push_back(std::move(s));
  }
  std::vector<std::vector<Series<F>>> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      Series<F> s(vars, N, ctx);
      for (std::size_t a = 0; a < n; ++a) {
        if (P[k][a].is_zero()) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (Pinv[b][i].is_zero()) continue;
          s += R(a, b).scaled(P[k][a] * Pinv[b][i]);
        }
      }
      rows[k].push_back(compose<F>(s, args));
    }
  }
  return OperatorField<F>(std::move(rows), R.reliable_degree());
}

template <Coefficient F>
NijenhuisCheck torsion_check(const TwoFormValued<F>& torsion, int through_degree) {
  if (through_degree > torsion.reliable_degree()) {
    throw DomainError("torsion is reliable only through degree " + std::to_string(torsion.reliable_degree()) +
                      ", requested " + std::to_string(through_degree));
  }
  const std::size_t n = torsion.dim();
  std::optional<TorsionWitness> best;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (const auto& [m, c] : torsion(k, i, j).terms()) {
          if (m.degree() > through_degree) break;
          if (negligible(c)) continue;
          if (!best || m.degree() < best->degree) best = TorsionWitness{m.degree(), i, j, k, c.str()};
          break;
        }
      }
    }
  }
  return NijenhuisCheck{!best.has_value(), through_degree, best};
}

template <Coefficient F>
NijenhuisCheck is_nijenhuis(const OperatorField<F>& R, int through_degree) {
  if (through_degree > R.reliable_degree() - 1) {
    throw DomainError("torsion is reliable only through degree " + std::to_string(R.reliable_degree() - 1) +
                      ", requested " + std::to_string(through_degree));
  }
  return torsion_check(nijenhuis_torsion(R), through_degree);
}

template class VectorField<Rational>;
template class VectorField<BigFloat>;
template class OperatorField<Rational>;
template class OperatorField<BigFloat>;
template class TwoFormValued<Rational>;
template class TwoFormValued<BigFloat>;

#define NIJLIN_INSTANTIATE(F)                                                                         \
  template VectorField<F> lie_bracket<F>(const VectorField<F>&, const VectorField<F>&);              \
  template TwoFormValued<F> nijenhuis_torsion<F>(const OperatorField<F>&);                           \
  template TwoFormValued<F> fn_bracket<F>(const OperatorField<F>&, const OperatorField<F>&);         \
  template OperatorField<F> transform_operator<F>(const OperatorField<F>&, const FormalChange<F>&);  \
  template TwoFormValued<F> transport_two_form<F>(const TwoFormValued<F>&, const FormalChange<F>&);  \
  template OperatorField<F> apply_linear_change<F>(const OperatorField<F>&, const Matrix<F>&);       \
  template OperatorField<F> jacobian<F>(const std::vector<Series<F>>&);                              \
  template NijenhuisCheck torsion_check<F>(const TwoFormValued<F>&, int);                            \
  template NijenhuisCheck is_nijenhuis<F>(const OperatorField<F>&, int);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
