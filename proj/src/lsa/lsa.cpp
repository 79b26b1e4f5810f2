#include "nijlin/lsa/lsa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "nijlin/error.hpp"

namespace nijlin {

namespace {

template <Coefficient F>
using Vec = std::vector<F>;

template <Coefficient F>
double mag(const F& x) {
  return std::abs(x.to_double());
}

template <Coefficient F>
double vec_mag(const Vec<F>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, mag(x));
  return m;
}

template <Coefficient F>
Vec<F> sub(const Vec<F>& a, const Vec<F>& b) {
  Vec<F> r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

template <Coefficient F>
Vec<F> add(const Vec<F>& a, const Vec<F>& b) {
  Vec<F> r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

template <Coefficient F>
Vec<F> sc(const F& c, const Vec<F>& a) {
  Vec<F> r = a;
  for (auto& x : r) x *= c;
  return r;
}

template <Coefficient F>
F det2(const Vec<F>& u, const Vec<F>& v) {
  return u[0] * v[1] - u[1] * v[0];
}

/// (s, t) with w = s·b1 + t·b2.
template <Coefficient F>
std::pair<F, F> coords(const Vec<F>& b1, const Vec<F>& b2, const Vec<F>& w) {
  const F d = det2(b1, b2);
  return {(w[0] * b2[1] - w[1] * b2[0]) / d, (b1[0] * w[1] - b1[1] * w[0]) / d};
}

/// Zero test for the decision tree. Floats below the tolerance count as
/// zero; those between the tolerance and its square root mark the answer
/// as unreliable.
template <Coefficient F>
struct ZeroTest {
  double tol;
  bool ambiguous = false;
  std::string where;

  bool operator()(const F& x, const char* what) { return check(mag(x), what); }
  bool operator()(const Vec<F>& v, const char* what) { return check(vec_mag(v), what); }

 private:
  bool check(double v, const char* what) {
    if constexpr (is_exact_field<F>) {
      return v == 0.0;
    } else {
      if (v <= tol) return true;
      if (v <= std::sqrt(tol) && !ambiguous) {
        ambiguous = true;
        where = what;
      }
      return false;
    }
  }
};

template <Coefficient F>
Vec<F> pick_max_det(const Vec<F>& ref, const Vec<F>& e0, const Vec<F>& e1) {
  return mag(det2(ref, e0)) >= mag(det2(ref, e1)) ? e0 : e1;
}

template <Coefficient F>
bool exact_sqrt(const F& x, F& root) {
  if constexpr (is_exact_field<F>) {
    return rational_sqrt(x, root);
  } else {
    root = x.sqrt();
    return true;
  }
}

template <Coefficient F>
Matrix<F> columns(const Vec<F>& c0, const Vec<F>& c1) {
  return {{c0[0], c1[0]}, {c0[1], c1[1]}};
}

template <Coefficient F>
ClassLabel make_label(Family f, std::optional<F> p = std::nullopt) {
  ClassLabel l{f, std::nullopt, false};
  if (p) l.param = Alpha{*p};
  return l;
}

template <Coefficient F>
struct Decision {
  ClassLabel label;
  std::optional<Matrix<F>> witness;
  std::string note;
};

template <Coefficient F>
Decision<F> decide(const Lsa<F>& A, ZeroTest<F>& z) {
  const auto& ctx = A.context();
  const F one = ctx.make(1L);
  const F two = ctx.make(2L);
  const Vec<F> e0 = A.basis_vector(0);
  const Vec<F> e1 = A.basis_vector(1);
  auto mul = [&](const Vec<F>& x, const Vec<F>& y) { return A.product(x, y); };
  auto br = [&](const Vec<F>& x, const Vec<F>& y) { return sub(mul(x, y), mul(y, x)); };

  const Vec<F> c = br(e0, e1);
  if (z(c, "commutator [e1, e2]")) {
    // Commutative: look for a unit u with u⋆e_j = e_j.
    struct Row {
      F p, q, rhs;
    };
    std::vector<Row> rows;
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < 2; ++k) rows.push_back({A(k, 0, j), A(k, 1, j), ctx.make(j == k ? 1L : 0L)});
    }
    std::optional<Vec<F>> unit;
    double best = 0.0;
    std::size_t r1 = 0, r2 = 0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = a + 1; b < rows.size(); ++b) {
        const double d = mag(F(rows[a].p * rows[b].q - rows[a].q * rows[b].p));
        if (d > best) {
          best = d;
          r1 = a;
          r2 = b;
        }
      }
    }
    const F d = rows[r1].p * rows[r2].q - rows[r1].q * rows[r2].p;
    if (!z(d, "unit equations")) {
      const F s = (rows[r1].rhs * rows[r2].q - rows[r2].rhs * rows[r1].q) / d;
      const F t = (rows[r1].p * rows[r2].rhs - rows[r2].p * rows[r1].rhs) / d;
      bool consistent = true;
      for (const auto& r : rows) {
        if (!z(F(r.p * s + r.q * t - r.rhs), "unit residual")) consistent = false;
      }
      if (consistent) unit = Vec<F>{s, t};
    }

    if (unit) {
      const Vec<F> w = pick_max_det(*unit, e0, e1);
      const auto [s, t] = coords(w, *unit, mul(w, w));
      const F disc = s * s + ctx.make(4L) * t;
      if (z(disc, "discriminant of w⋆w = s w + t 1")) {
        return {make_label<F>(Family::c4), columns(sub(w, sc(s / two, *unit)), *unit), ""};
      }
      const Family fam = disc.sign() > 0 ? Family::c5plus : Family::c5minus;
      F r = one;
      if (!exact_sqrt(disc.abs(), r)) {
        return {make_label<F>(fam), std::nullopt, "witness needs √" + disc.abs().str() + ", not rational"};
      }
      const Vec<F> e = sc(one / r, sub(sc(two, w), sc(s, *unit)));
      return {make_label<F>(fam), columns(e, *unit), ""};
    }

    const Vec<F> tau{A(0, 0, 0) + A(1, 1, 0), A(0, 0, 1) + A(1, 1, 1)};
    if (z(tau, "trace form")) {
      const Vec<F> w00 = mul(e0, e0);
      const Vec<F> w11 = mul(e1, e1);
      const bool first = vec_mag(w00) >= vec_mag(w11);
      const Vec<F>& w = first ? e0 : e1;
      return {make_label<F>(Family::c3), columns(first ? w00 : w11, w), ""};
    }
    // Annihilator n: Σ_i n_i a^k_{ij} = 0 for all k, j.
    Vec<F> row{A(0, 0, 0), A(0, 1, 0)};
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < 2; ++k) {
        Vec<F> cand{A(k, 0, j), A(k, 1, j)};
        if (vec_mag(cand) > vec_mag(row)) row = cand;
      }
    }
    const Vec<F> n{-row[1], row[0]};
    const Vec<F> w = pick_max_det(n, e0, e1);
    const Vec<F> ww = mul(w, w);
    const auto [s, t] = coords(w, n, ww);
    (void)t;
    if (z(s, "w⋆w along w")) {
      return {make_label<F>(Family::c2), std::nullopt, "degenerate pivot in the c2 branch"};
    }
    return {make_label<F>(Family::c2), columns(n, sc(one / (s * s), ww)), ""};
  }

  // Non-abelian: the derived algebra is spanned by f1.
  const F cm = c[0].abs() < c[1].abs() ? c[1].abs() : c[0].abs();
  const Vec<F> f = sc(one / cm, c);
  const Vec<F> g = pick_max_det(f, e0, e1);
  const Vec<F> ff = mul(f, f);
  const auto [s, t] = coords(f, g, ff);
  (void)s;
  const F cc = coords(f, g, br(f, g)).first;

  if (!z(t, "f1⋆f1 off the derived line")) {
    const F kap = coords(f, g, br(f, ff)).first;
    if (z(kap, "[f1, f1⋆f1]")) {
      return {make_label<F>(Family::b4plus), std::nullopt, "degenerate pivot in the b4 branch"};
    }
    const Family fam = kap.sign() > 0 ? Family::b4plus : Family::b4minus;
    F r = one;
    if (!exact_sqrt(kap.abs(), r)) {
      return {make_label<F>(fam), std::nullopt, "witness needs √" + kap.abs().str() + ", not rational"};
    }
    const Vec<F> b0 = sc(one / r, f);
    const Vec<F> b1 = sc(ctx.make(kap.sign() > 0 ? 1L : -1L), mul(b0, b0));
    return {make_label<F>(fam), columns(b0, b1), ""};
  }

  const Vec<F> fg = mul(f, g);
  const bool left_null = z(ff, "f1⋆f1") && z(fg, "f1⋆g");
  if (left_null) {
    if (z(cc, "[f1, g]")) return {make_label<F>(Family::b1, ctx.make(0L)), std::nullopt, "degenerate pivot"};
    const Vec<F> e2p = sc(-one / cc, g);
    const auto [bc, alpha] = coords(f, e2p, mul(e2p, e2p));
    if (!z(F(alpha - one), "α − 1")) {
      return {make_label<F>(Family::b1, alpha), columns(f, sub(e2p, sc(bc / (one - alpha), f))), ""};
    }
    if (z(bc, "b3 shear")) return {make_label<F>(Family::b1, one), columns(f, e2p), ""};
    return {make_label<F>(Family::b3), columns(sc(bc, f), e2p), ""};
  }

  const F lam = coords(f, g, fg).first;
  if (z(lam, "f1⋆g")) return {make_label<F>(Family::b2, one), std::nullopt, "degenerate pivot in the b2 branch"};
  const Vec<F> e2p = sc(one / lam, g);
  const F cp = coords(f, e2p, br(f, e2p)).first;
  const auto [bc, unit_coef] = coords(f, e2p, mul(e2p, e2p));
  (void)unit_coef;
  if (z(cp, "[f1, e2]")) return {make_label<F>(Family::b2, one), std::nullopt, "degenerate pivot in the b2 branch"};
  if (!z(F(one - cp), "1 − 1/β")) {
    const F beta = one / cp;
    return {make_label<F>(Family::b2, beta), columns(f, sub(e2p, sc(bc / (one - cp), f))), ""};
  }
  if (z(bc, "b5 shear")) return {make_label<F>(Family::b2, one), columns(f, e2p), ""};
  return {make_label<F>(Family::b5), columns(sc(bc, f), e2p), ""};
}

}  // namespace

// ---------------------------------------------------------------- Lsa

template <Coefficient F>
Lsa<F>::Lsa(std::size_t n, typename F::Context ctx) : n_(n), ctx_(ctx), a_(n * n * n, ctx.make(0L)) {
  if (n == 0) throw DomainError("algebra of dimension 0");
}

template <Coefficient F>
Lsa<F>::Lsa(const std::vector<std::vector<std::vector<F>>>& table)
    : n_(table.size()), ctx_(table.empty() || table[0].empty() || table[0][0].empty() ? typename F::Context{}
                                                                                       : table[0][0][0].context()) {
  if (n_ == 0) throw DomainError("algebra of dimension 0");
  a_.reserve(n_ * n_ * n_);
  for (const auto& plane : table) {
    if (plane.size() != n_) throw MismatchError("structure-constant table is not n×n×n");
    for (const auto& row : plane) {
      if (row.size() != n_) throw MismatchError("structure-constant table is not n×n×n");
      for (const auto& x : row) {
        if (!(x.context() == ctx_)) throw MismatchError("structure constants mix coefficient modes");
        a_.push_back(x);
      }
    }
  }
}

template <Coefficient F>
std::vector<std::vector<std::vector<F>>> Lsa<F>::table() const {
  std::vector<std::vector<std::vector<F>>> t(n_, std::vector<std::vector<F>>(n_));
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) t[k][i].push_back((*this)(k, i, j));
    }
  }
  return t;
}

template <Coefficient F>
typename Lsa<F>::Vec Lsa<F>::product(const Vec& x, const Vec& y) const {
  if (x.size() != n_ || y.size() != n_) throw MismatchError("vector dimension does not match the algebra");
  Vec out(n_, ctx_.make(0L));
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i].is_zero()) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (y[j].is_zero()) continue;
      const F xy = x[i] * y[j];
      for (std::size_t k = 0; k < n_; ++k) {
        const F& a = (*this)(k, i, j);
        if (!a.is_zero()) out[k] += a * xy;
      }
    }
  }
  return out;
}

template <Coefficient F>
typename Lsa<F>::Vec Lsa<F>::basis_vector(std::size_t i) const {
  Vec v(n_, ctx_.make(0L));
  v[i] = ctx_.make(1L);
  return v;
}

template <Coefficient F>
bool Lsa<F>::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const F& x) { return x.is_zero(); });
}

template <Coefficient F>
double Lsa<F>::scale() const {
  double m = 0.0;
  for (const auto& x : a_) m = std::max(m, mag(x));
  return m;
}

template <Coefficient F>
Lsa<F> Lsa<F>::in_basis(const Matrix<F>& W) const {
  if (W.size() != n_) throw MismatchError("basis matrix has the wrong size");
  const Matrix<F> Winv = matrix_inverse(W);
  std::vector<Vec> b(n_, Vec(n_, ctx_.make(0L)));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) b[i][k] = W[k][i];
  }
  Lsa out(n_, ctx_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const Vec p = product(b[i], b[j]);
      for (std::size_t k = 0; k < n_; ++k) {
        F s = ctx_.make(0L);
        for (std::size_t l = 0; l < n_; ++l) s += Winv[k][l] * p[l];
        out.set(k, i, j, s);
      }
    }
  }
  return out;
}

template <Coefficient F>
Lsa<F> Lsa<F>::scaled(const F& c) const {
  Lsa out = *this;
  for (auto& x : out.a_) x *= c;
  return out;
}

VarList default_vars(std::size_t n) {
  if (n == 1) return {"x"};
  if (n == 2) return {"x", "y"};
  VarList v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

// ---------------------------------------------------------- extraction

template <Coefficient F>
F scalar_part(const OperatorField<F>& R, std::span<const F> basepoint) {
  const std::size_t n = R.dim();
  std::vector<F> p(basepoint.begin(), basepoint.end());
  if (p.empty()) p.assign(n, R.context().make(0L));
  if (p.size() != n) throw MismatchError("basepoint has the wrong dimension");
  const Matrix<F> M = R.evaluate(p);
  const F lambda = M[0][0];
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const F expect = k == i ? lambda : R.context().make(0L);
      if (!negligible(F(M[k][i] - expect))) {
        throw DomainError("R at the basepoint is not a multiple of the identity (entry (" + std::to_string(k) +
                          ", " + std::to_string(i) + ") = " + M[k][i].str() + "); linear part not defined");
      }
    }
  }
  return lambda;
}

template <Coefficient F>
Lsa<F> extract_linear_lsa(const OperatorField<F>& R, std::span<const F> basepoint) {
  const std::size_t n = R.dim();
  if (R.vars().size() != n) throw MismatchError("operator dimension differs from the number of coordinates");
  if (R.truncation() < 1) throw DomainError("linear part needs truncation ≥ 1");
  (void)scalar_part(R, basepoint);
  std::vector<F> p(basepoint.begin(), basepoint.end());
  if (p.empty()) p.assign(n, R.context().make(0L));
  Lsa<F> A(n, R.context());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) A.set(k, i, j, R(k, i).derivative(j).evaluate(p));
    }
  }
  return A;
}

template <Coefficient F>
OperatorField<F> operator_of_lsa(const Lsa<F>& A, const VarList& vars, int truncation) {
  const std::size_t n = A.dim();
  if (vars.size() != n) throw MismatchError("need one coordinate per basis vector");
  if (truncation < 1) throw DomainError("operator of an algebra needs truncation ≥ 1");
  std::vector<std::vector<Series<F>>> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      Series<F> s(vars, truncation, A.context());
      for (std::size_t j = 0; j < n; ++j) {
        if (!A(k, i, j).is_zero()) s.add_term(Monomial::unit(n, j), A(k, i, j));
      }
      rows[k].push_back(std::move(s));
    }
  }
  return OperatorField<F>(std::move(rows));
}

// ------------------------------------------------------------- axioms

template <Coefficient F>
LeftSymmetryCheck check_left_symmetric(const Lsa<F>& A, Tolerance tol) {
  const std::size_t n = A.dim();
  const double s = A.scale();
  const double bound = is_exact_field<F> ? 0.0 : tol.relative * s * s;
  LeftSymmetryCheck out{true, std::nullopt, 0.0};
  auto assoc = [&](const Vec<F>& x, const Vec<F>& y, const Vec<F>& z) {
    return sub(A.product(A.product(x, y), z), A.product(x, A.product(y, z)));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto ei = A.basis_vector(i), ej = A.basis_vector(j), ek = A.basis_vector(k);
        const Vec<F> d = sub(assoc(ei, ej, ek), assoc(ej, ei, ek));
        const double m = vec_mag(d);
        out.max_defect = std::max(out.max_defect, m);
        const bool bad = is_exact_field<F> ? std::any_of(d.begin(), d.end(), [](const F& x) { return !x.is_zero(); })
                                           : m > bound;
        if (bad && out.left_symmetric) {
          out.left_symmetric = false;
          out.violation = std::array<std::size_t, 3>{i, j, k};
        }
      }
    }
  }
  return out;
}

template <Coefficient F>
LieInfo<F> associated_lie(const Lsa<F>& A, Tolerance tol) {
  const std::size_t n = A.dim();
  Lsa<F> c(n, A.context());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) c.set(k, i, j, A(k, i, j) - A(k, j, i));
    }
  }
  const double s = A.scale();
  auto is_small = [&](const Vec<F>& v, double power) {
    if constexpr (is_exact_field<F>) {
      return std::all_of(v.begin(), v.end(), [](const F& x) { return x.is_zero(); });
    } else {
      return vec_mag(v) <= tol.relative * std::pow(s, power);
    }
  };
  LieInfo<F> out{c, true, true, std::nullopt};
  for (std::size_t k = 0; k < n && out.abelian; ++k) {
    for (std::size_t i = 0; i < n && out.abelian; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_small(Vec<F>{c(k, i, j)}, 1.0)) {
          out.abelian = false;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto x = A.basis_vector(i), y = A.basis_vector(j), z = A.basis_vector(k);
        const Vec<F> jac = add(add(c.product(c.product(x, y), z), c.product(c.product(y, z), x)),
                               c.product(c.product(z, x), y));
        if (!is_small(jac, 2.0) && out.jacobi) {
          out.jacobi = false;
          out.jacobi_violation = std::array<std::size_t, 3>{i, j, k};
        }
      }
    }
  }
  return out;
}

// ------------------------------------------------------------- labels

std::string to_string(Family f) {
  switch (f) {
    case Family::b1: return "b1";
    case Family::b2: return "b2";
    case Family::b3: return "b3";
    case Family::b4plus: return "b4plus";
    case Family::b4minus: return "b4minus";
    case Family::b5: return "b5";
    case Family::c0: return "c0";
    case Family::c2: return "c2";
    case Family::c3: return "c3";
    case Family::c4: return "c4";
    case Family::c5plus: return "c5plus";
    case Family::c5minus: return "c5minus";
  }
  return "?";
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> all{Family::b1, Family::b2, Family::b3, Family::b4plus,
                                       Family::b4minus, Family::b5, Family::c0, Family::c2,
                                       Family::c3, Family::c4, Family::c5plus, Family::c5minus};
  return all;
}

bool has_parameter(Family f) { return f == Family::b1 || f == Family::b2; }

std::string ClassLabel::str() const {
  std::string s = to_string(family);
  if (param) s += ":" + param->describe();
  return s;
}

ClassLabel ClassLabel::parse(std::string_view text, std::optional<mpfr_prec_t> float_bits) {
  static const std::map<std::string, Family> tags{
      {"b1", Family::b1},          {"b2", Family::b2},          {"b3", Family::b3},
      {"b4plus", Family::b4plus},  {"b4+", Family::b4plus},     {"b4minus", Family::b4minus},
      {"b4-", Family::b4minus},    {"b5", Family::b5},          {"c0", Family::c0},
      {"c1", Family::c0},          {"c2", Family::c2},          {"c3", Family::c3},
      {"c4", Family::c4},          {"c5plus", Family::c5plus},  {"c5+", Family::c5plus},
      {"c5minus", Family::c5minus}, {"c5-", Family::c5minus}};
  const std::size_t colon = text.find(':');
  std::string tag(text.substr(0, colon));
  std::erase_if(tag, [](unsigned char ch) { return std::isspace(ch); });
  std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char ch) { return std::tolower(ch); });
  const auto it = tags.find(tag);
  if (it == tags.end()) throw ParseError("unknown family '" + tag + "'", 0);
  ClassLabel l{it->second, std::nullopt, tag == "c1"};
  if (colon == std::string_view::npos) {
    if (has_parameter(l.family)) throw ParseError("family " + tag + " needs a parameter (e.g. " + tag + ":2)", text.size());
    return l;
  }
  if (!has_parameter(l.family)) throw ParseError("family " + tag + " takes no parameter", colon);
  std::string_view p = text.substr(colon + 1);
  for (std::string_view prefix : {"alpha=", "beta="}) {
    if (p.substr(0, prefix.size()) == prefix) p.remove_prefix(prefix.size());
  }
  l.param = parse_alpha(p, float_bits);
  if (l.family == Family::b2 && l.param->sign() == 0) throw DomainError("b2 requires β ≠ 0");
  return l;
}

bool same_label(const ClassLabel& a, const ClassLabel& b) {
  if (a.family != b.family) return false;
  if (a.param.has_value() != b.param.has_value()) return false;
  if (!a.param) return true;
  if (a.param->is_rational() && b.param->is_rational()) {
    return std::get<Rational>(a.param->value) == std::get<Rational>(b.param->value);
  }
  return a.param->describe() == b.param->describe();
}

template <Coefficient F>
F param_value(const Alpha& a, const typename F::Context& ctx) {
  if (const auto* q = std::get_if<Rational>(&a.value)) return ctx.make(*q);
  if (const auto* cf = std::get_if<ContinuedFraction>(&a.value)) {
    if (cf->kind() == ContinuedFraction::Kind::Finite && !cf->truncated()) return ctx.make(*cf->rational_value());
    if constexpr (is_exact_field<F>) {
      throw DomainError("irrational parameter " + cf->notation() + " in rational mode");
    } else {
      return cf->value(ctx.bits);
    }
  }
  const auto& f = std::get<BigFloat>(a.value);
  if constexpr (is_exact_field<F>) {
    throw DomainError("float parameter " + f.str() + " in rational mode");
  } else {
    BigFloat r(ctx.bits);
    mpfr_set(r.get(), f.get(), MPFR_RNDN);
    return r;
  }
}

template <Coefficient F>
OperatorField<F> template_operator(const ClassLabel& label, const VarList& vars, int truncation,
                                   typename F::Context ctx) {
  if (vars.size() != 2) throw DomainError("templates are two-dimensional");
  using S = Series<F>;
  const S zero(vars, truncation, ctx);
  const S x = S::variable(vars, truncation, 0, ctx);
  const S y = S::variable(vars, truncation, 1, ctx);
  auto k = [&](long c) { return ctx.make(c); };
  std::optional<F> p;
  if (has_parameter(label.family)) {
    if (!label.param) throw DomainError("family " + to_string(label.family) + " needs a parameter");
    p = param_value<F>(*label.param, ctx);
  }
  std::vector<std::vector<S>> r;
  switch (label.family) {
    case Family::b1: r = {{zero, x}, {zero, y.scaled(*p)}}; break;
    case Family::b2:
      if (p->is_zero()) throw DomainError("b2 requires β ≠ 0");
      r = {{y, x.scaled(k(1) - k(1) / *p)}, {zero, y}};
      break;
    case Family::b3: r = {{zero, x + y}, {zero, y}}; break;
    case Family::b4plus: r = {{zero, -x}, {x, y.scaled(k(-2))}}; break;
    case Family::b4minus: r = {{zero, -x}, {-x, y.scaled(k(-2))}}; break;
    case Family::b5: r = {{y, y}, {zero, y}}; break;
    case Family::c0: r = {{zero, zero}, {zero, zero}}; break;
    case Family::c2: r = {{zero, zero}, {zero, y}}; break;
    case Family::c3: r = {{zero, y}, {zero, zero}}; break;
    case Family::c4: r = {{y, x}, {zero, y}}; break;
    case Family::c5plus: r = {{y, x}, {x, y}}; break;
    case Family::c5minus: r = {{y, x}, {-x, y}}; break;
  }
  return OperatorField<F>(std::move(r));
}

template <Coefficient F>
Lsa<F> template_lsa(const ClassLabel& label, typename F::Context ctx) {
  return extract_linear_lsa(template_operator<F>(label, default_vars(2), 1, ctx));
}

std::string to_string(IdentifyStatus s) {
  switch (s) {
    case IdentifyStatus::Identified: return "Identified";
    case IdentifyStatus::NotLeftSymmetric: return "NotLeftSymmetric";
    case IdentifyStatus::UnclassifiedAtTolerance: return "UnclassifiedAtTolerance";
  }
  return "?";
}

// ------------------------------------------------------ identification

template <Coefficient F>
Identification<F> identify_2d(const Lsa<F>& A, Tolerance tol) {
  if (A.dim() != 2) throw DomainError("identification is implemented for dimension 2 only");
  const auto& ctx = A.context();
  Identification<F> out;
  out.status = IdentifyStatus::Identified;
  out.tolerance = is_exact_field<F> ? 0.0 : tol.relative;
  out.trace_form = {A(0, 0, 0) + A(1, 1, 0), A(0, 0, 1) + A(1, 1, 1)};
  // det R(x) with R^k_i = a^k_{i0} x + a^k_{i1} y.
  out.det_form = {A(0, 0, 0) * A(1, 1, 0) - A(0, 1, 0) * A(1, 0, 0),
                  A(0, 0, 0) * A(1, 1, 1) + A(0, 0, 1) * A(1, 1, 0) - A(0, 1, 0) * A(1, 0, 1) -
                      A(0, 1, 1) * A(1, 0, 0),
                  A(0, 0, 1) * A(1, 1, 1) - A(0, 1, 1) * A(1, 0, 1)};

  const auto ls = check_left_symmetric(A, tol);
  if (!ls.left_symmetric) {
    out.status = IdentifyStatus::NotLeftSymmetric;
    out.violation = ls.violation;
    out.note = "associator not symmetric in its first two arguments";
    return out;
  }
  if (A.is_zero()) {
    out.label = ClassLabel{Family::c0, std::nullopt, false};
    out.witness = identity_matrix<F>(2, ctx);
    out.change = out.witness;
    out.verified = true;
    return out;
  }

  // Floats: rescale to max |a| = 1 so the zero tests are relative. The
  // algebra with constants a/s is A written in the basis e/s.
  Lsa<F> An = A;
  F inv_scale = ctx.make(1L);
  if constexpr (!is_exact_field<F>) {
    F m = ctx.make(0L);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          if (m < A(k, i, j).abs()) m = A(k, i, j).abs();
    inv_scale = ctx.make(1L) / m;
    An = A.scaled(inv_scale);
  }

  ZeroTest<F> z{tol.relative, false, {}};
  Decision<F> d = decide(An, z);
  out.label = d.label;
  out.note = d.note;
  // A template is its own witness.
  if (!z.ambiguous && A == template_lsa<F>(d.label, ctx)) {
    d.witness = identity_matrix<F>(2, ctx);
    inv_scale = ctx.make(1L);
  }
  if (d.witness) {
    Matrix<F> W = *d.witness;
    for (auto& row : W)
      for (auto& x : row) x *= inv_scale;
    out.witness = W;
  }
  if (z.ambiguous) {
    out.status = IdentifyStatus::UnclassifiedAtTolerance;
    out.note = "zero test on " + z.where + " falls between the tolerance and its square root";
  }
  if (!out.witness) return out;

  try {
    out.change = matrix_inverse(*out.witness);
  } catch (const DomainError&) {
    out.witness.reset();
    out.note = "witness basis is singular";
    return out;
  }
  const Lsa<F> got = A.in_basis(*out.witness);
  const Lsa<F> want = template_lsa<F>(*out.label, ctx);
  if constexpr (is_exact_field<F>) {
    out.verified = got == want;
    out.residual = out.verified ? 0.0 : 1.0;
  } else {
    double r = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) r = std::max(r, mag(F(got(k, i, j) - want(k, i, j))));
    out.residual = r;
    out.verified = r <= std::sqrt(tol.relative);
  }
  if (!out.verified && out.note.empty()) out.note = "conjugation check failed";
  return out;
}

// ------------------------------------------------------------ verdicts

std::string to_string(Category c) { return c == Category::Smooth ? "smooth" : "analytic"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Degenerate: return "Degenerate";
    case Outcome::Nondegenerate: return "Nondegenerate";
    case Outcome::Unknown: return "Unknown";
  }
  return "?";
}

Category parse_category(std::string_view text) {
  if (text == "smooth") return Category::Smooth;
  if (text == "analytic") return Category::Analytic;
  throw ParseError("category must be 'smooth' or 'analytic', got '" + std::string(text) + "'", 0);
}

Verdict degeneracy_verdict(const ClassLabel& label, Category category,
                           const std::optional<BrjunoCertificate>& alpha_class) {
  Verdict v{label, category, Outcome::Unknown, "", std::nullopt, std::nullopt};
  const std::string cat = to_string(category);
  const std::string tag = to_string(label.family);
  switch (label.family) {
    case Family::c0:
      v.outcome = Outcome::Degenerate;
      v.evidence = "zero algebra: listed degenerate in the " + cat + " table, where it is spelled c1";
      return v;
    case Family::c2:
    case Family::c3:
    case Family::c4:
    case Family::b5:
    case Family::b2:
      v.outcome = Outcome::Degenerate;
      v.evidence = tag + " is listed degenerate in the " + cat + " table";
      return v;
    case Family::b3:
    case Family::b4plus:
    case Family::b4minus:
    case Family::c5plus:
    case Family::c5minus:
      v.outcome = Outcome::Nondegenerate;
      v.evidence = tag + " is listed nondegenerate in the " + cat + " table";
      return v;
    case Family::b1: break;
  }

  if (!label.param) throw DomainError("b1 verdict needs α");
  const Alpha& alpha = *label.param;
  const SigmaFlags flags = sigma_membership(alpha);
  v.sigma = flags;
  if (alpha_class) v.certificate = alpha_class;

  if (category == Category::Smooth) {
    switch (flags.in_sigma_sm) {
      case Tri::Yes:
        v.outcome = Outcome::Degenerate;
        v.evidence = "α ∈ Σ_sm (" + flags.reason + ")";
        break;
      case Tri::No:
        v.outcome = Outcome::Nondegenerate;
        v.evidence = "α ∉ Σ_sm (" + flags.reason + ")";
        break;
      case Tri::Unknown:
        v.evidence = "Σ_sm membership undecided: " + flags.reason;
        break;
    }
    return v;
  }

  switch (flags.in_sigma_an) {
    case Tri::Yes:
      v.outcome = Outcome::Degenerate;
      v.evidence = "α ∈ Σ_an (" + flags.reason + ")";
      return v;
    case Tri::Unknown:
      v.evidence = "Σ_an membership undecided: " + flags.reason;
      return v;
    case Tri::No: break;
  }

  const bool negative_irrational = alpha.is_cf() && alpha.sign() < 0 &&
                                   std::get<ContinuedFraction>(alpha.value).kind() != ContinuedFraction::Kind::Finite;
  if (!negative_irrational) {
    v.outcome = Outcome::Nondegenerate;
    v.evidence = "α ∉ Σ_an ∪ Σ_u (" + flags.reason + ")";
    return v;
  }
  if (!alpha_class) {
    throw DomainError("analytic verdict for negative irrational α = " + alpha.describe() +
                      " needs a Brjuno certificate");
  }
  switch (alpha_class->decision) {
    case BrjunoDecision::NonBrjuno:
      v.outcome = Outcome::Degenerate;
      v.evidence = "α ∈ Σ_u: negative irrational, not Brjuno (" + alpha_class->reason + ")";
      break;
    case BrjunoDecision::Brjuno:
      v.outcome = Outcome::Nondegenerate;
      v.evidence = "α ∉ Σ_an ∪ Σ_u: negative irrational Brjuno number (" + alpha_class->reason + ")";
      break;
    case BrjunoDecision::Inconclusive:
      v.evidence = "Σ_u membership undecided at depth " + std::to_string(alpha_class->depth) + ": " +
                   alpha_class->reason;
      break;
  }
  return v;
}

template class Lsa<Rational>;
template class Lsa<BigFloat>;

#define NIJLIN_INSTANTIATE(F)                                                                        \
  template Lsa<F> extract_linear_lsa<F>(const OperatorField<F>&, std::span<const F>);               \
  template F scalar_part<F>(const OperatorField<F>&, std::span<const F>);                           \
  template LeftSymmetryCheck check_left_symmetric<F>(const Lsa<F>&, Tolerance);                     \
  template LieInfo<F> associated_lie<F>(const Lsa<F>&, Tolerance);                                  \
  template OperatorField<F> operator_of_lsa<F>(const Lsa<F>&, const VarList&, int);                 \
  template OperatorField<F> template_operator<F>(const ClassLabel&, const VarList&, int, F::Context); \
  template Lsa<F> template_lsa<F>(const ClassLabel&, F::Context);                                   \
  template F param_value<F>(const Alpha&, const F::Context&);                                       \
  template Identification<F> identify_2d<F>(const Lsa<F>&, Tolerance);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
