#include "nijlin/normalform/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nijlin/error.hpp"
#include "nijlin/series/io.hpp"

namespace nijlin {

namespace {

template <Coefficient F>
double mag(const F& x) {
  return std::abs(x.to_double());
}

/// Round-off threshold for a coefficient of the given size scale.
template <Coefficient F>
bool small(const F& x, double scale = 1.0) {
  if constexpr (is_exact_field<F>) {
    (void)scale;
    return x.is_zero();
  } else {
    const auto ctx = x.context();
    return x.abs() <= ctx.zero_tolerance() * BigFloat::from_double(std::max(1.0, scale), ctx.bits);
  }
}

template <Coefficient F>
bool small_series(const Series<F>& s, double scale = 1.0) {
  for (const auto& [m, c] : s.terms()) {
    if (!small(c, scale)) return false;
  }
  return true;
}

/// Kind of obstruction a factor causes when it multiplies a nonzero value.
template <Coefficient F>
std::optional<ObstructionKind> classify(const F& factor, const DivisorPolicy& policy) {
  if constexpr (is_exact_field<F>) {
    (void)policy;
    if (factor.is_zero()) return ObstructionKind::Resonance;
    return std::nullopt;
  } else {
    const auto bits = factor.precision();
    const BigFloat a = factor.abs();
    if (a < BigFloat::power_of_two(-(static_cast<long>(bits) - policy.hard_floor_margin), bits)) {
      return ObstructionKind::Resonance;
    }
    if (a < BigFloat::power_of_two(policy.divisor_floor_log2, bits)) return ObstructionKind::SmallDivisor;
    return std::nullopt;
  }
}

Monomial mono(int i, int j) {
  return Monomial{i, j};
}

template <Coefficient F>
void require_two_dim(const OperatorField<F>& R) {
  if (R.dim() != 2 || R.vars().size() != 2) throw DomainError("normal forms are implemented in dimension 2");
}

/// R − λ₀·Id.
template <Coefficient F>
OperatorField<F> minus_scalar(const OperatorField<F>& R, const F& lambda0) {
  return R - OperatorField<F>::scalar(R.vars(), R.truncation(), lambda0);
}

/// Replaces the degree-d part of entry (k, i) by `part`.
template <Coefficient F>
OperatorField<F> with_part(const OperatorField<F>& R, std::size_t k, std::size_t i, int d, const Series<F>& part) {
  auto rows = R.rows();
  rows[k][i] = rows[k][i] - rows[k][i].homogeneous_part(d) + part;
  return OperatorField<F>(std::move(rows), R.reliable_degree());
}

template <Coefficient F>
double scale_of(const OperatorField<F>& R, int d) {
  double s = 1.0;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i) s = std::max(s, max_abs_coefficient(R(k, i).homogeneous_part(d)));
  return s;
}

/// Checks the degree-0 and degree-1 parts, and L-form in degrees 2 … k − 1.
/// In float mode the verified parts are replaced by their exact values.
template <Coefficient F>
OperatorField<F> require_form(const OperatorField<F>& R, const F& alpha, int k, const F& lambda0) {
  const auto& vars = R.vars();
  const int N = R.truncation();
  const auto ctx = R.context();
  const auto zero = Series<F>(vars, N, ctx);
  const auto u = Series<F>::variable(vars, N, 0, ctx);
  const auto v = Series<F>::variable(vars, N, 1, ctx);
  OperatorField<F> out = R;
  const OperatorField<F> S = minus_scalar(R, lambda0);
  // Degree 0 and 1.
  const Series<F> want1[2][2] = {{zero, u}, {zero, v.scaled(alpha)}};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      if (!small_series(S(r, c).homogeneous_part(0))) {
        throw DomainError("R(0) is not λ₀·Id");
      }
      if (!small_series(S(r, c).homogeneous_part(1) - want1[r][c], 1.0 + mag(alpha))) {
        throw DomainError("linear part is not [[0, x], [0, αy]] with α = " + alpha.str() + " (entry (" +
                          std::to_string(r) + ", " + std::to_string(c) + ") = " +
                          format_series(S(r, c).homogeneous_part(1)) + ")");
      }
      if constexpr (!is_exact_field<F>) {
        const Series<F> c0 = r == c ? Series<F>::constant(vars, N, lambda0) : zero;
        out = with_part(out, r, c, 0, c0);
        out = with_part(out, r, c, 1, want1[r][c]);
      }
    }
  }
  for (int d = 2; d < k; ++d) {
    const double sc = scale_of(S, d);
    const auto a = S(0, 0).homogeneous_part(d);
    const auto c = S(1, 0).homogeneous_part(d);
    const auto du = S(1, 1).homogeneous_part(d).derivative(0);
    if (!small_series(a, sc) || !small_series(c, sc) || !small_series(du, sc)) {
      throw DomainError("degree " + std::to_string(d) + " is not of the form [[0, l], [0, m(y)]]");
    }
  }
  return out;
}

/// The label's linear change to template coordinates, checked against α.
template <Coefficient F>
std::pair<Matrix<F>, OperatorField<F>> to_template_coordinates(const OperatorField<F>& R, const F& alpha,
                                                               const F& lambda0) {
  const auto A = extract_linear_lsa(R);
  const auto id = identify_2d(A);
  if (id.status != IdentifyStatus::Identified || !id.label) {
    throw DomainError("linear part not identified (" + to_string(id.status) + ")");
  }
  if (id.label->family != Family::b1) {
    throw DomainError("linear part is " + id.label->str() + ", not b1 with α = " + alpha.str());
  }
  const F found = param_value<F>(*id.label->param, alpha.context());
  if (!small(F(found - alpha), 1.0 + mag(alpha))) {
    throw DomainError("linear part is " + id.label->str() + " but α = " + alpha.str() + " was given");
  }
  if (!id.change) throw DomainError("no linear witness for " + id.label->str());
  OperatorField<F> moved = apply_linear_change(R, *id.change);
  moved = require_form(moved, alpha, 2, lambda0);
  return {*id.change, moved};
}

std::string monomial_text(const char* x, int m, const char* y, int n) {
  auto one = [](const char* v, int e) -> std::string {
    if (e == 0) return "";
    return e == 1 ? std::string(v) : std::string(v) + "^" + std::to_string(e);
  };
  std::string a = one(x, m), b = one(y, n);
  if (a.empty() && b.empty()) return "1";
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + "*" + b;
}

}  // namespace

std::string to_string(ObstructionKind k) { return k == ObstructionKind::Resonance ? "Resonance" : "SmallDivisor"; }

template <Coefficient F>
DegreeSlice<F> slice_of(const OperatorField<F>& R, int k) {
  require_two_dim(R);
  if (k < 1) throw DomainError("slices start at degree 1");
  return {k, R(0, 0).homogeneous_part(k), R(0, 1).homogeneous_part(k), R(1, 0).homogeneous_part(k),
          R(1, 1).homogeneous_part(k)};
}

template <Coefficient F>
std::pair<Series<F>, Series<F>> base_equations_residual(const DegreeSlice<F>& s, const F& alpha) {
  const auto& vars = s.a.vars();
  if (vars.size() != 2) throw DomainError("base equations are two-dimensional");
  const int N = s.a.truncation();
  const auto ctx = s.a.context();
  const auto u = Series<F>::variable(vars, N, 0, ctx);
  const auto v = Series<F>::variable(vars, N, 1, ctx);
  const auto av = v.scaled(alpha);
  const Series<F> first = u * s.d.derivative(0) - u * s.c.derivative(1) + u * s.a.derivative(0) + av * s.a.derivative(1);
  const Series<F> second = av * s.d.derivative(0) + u * s.c.derivative(0) + s.c.scaled(ctx.make(1L) - alpha);
  return {first, second};
}

template <Coefficient F>
DegreeStep<F> normalize_degree(const OperatorField<F>& R, const F& alpha, int k, DivisorPolicy policy) {
  require_two_dim(R);
  const int N = R.truncation();
  if (k < 2 || k > N) throw DomainError("degree " + std::to_string(k) + " outside 2 … " + std::to_string(N));
  const auto& vars = R.vars();
  const auto ctx = R.context();
  const F lambda0 = scalar_part(R);
  const OperatorField<F> R0 = require_form(R, alpha, k, lambda0);

  DegreeDiagnostics<F> diag{k, {}, {}, {}, std::numeric_limits<double>::infinity()};
  const DegreeSlice<F> s = slice_of(R0, k);
  Series<F> g(vars, N, ctx);
  for (int i = 1; i <= k; ++i) {
    const F ai = s.a.coefficient(mono(i, k - i));
    if (ai.is_zero()) continue;
    const F gi = ai / ctx.make(static_cast<long>(i));
    g.add_term(mono(i, k - i), gi);
    diag.removed.emplace_back(i, k - i);
    diag.g_coefficients.push_back(gi);
  }

  FormalChange<F> change = FormalChange<F>::identity(vars, N, ctx);
  OperatorField<F> Rk = R0;
  if (!g.is_zero()) {
    change = FormalChange<F>::from_step(k, {Series<F>(vars, N, ctx), g});
    Rk = transform_operator(R0, change);
  }

  const DegreeSlice<F> t = slice_of(Rk, k);
  const double sc = scale_of(Rk, k);
  // a − u g_u = a₀ v^k, and the first base equation forces a₀ = 0.
  if (!small_series(t.a, sc)) {
    throw NotNijenhuisError("degree " + std::to_string(k) + ": a = " + format_series(t.a) +
                            " survives the g-step; the first base equation fails (α k a₀ v^k ≠ 0)");
  }

  std::optional<Obstruction<F>> obstruction;
  for (int i = 0; i <= k; ++i) {
    const F ci = t.c.coefficient(mono(i, k - i));
    const F phi = normalization_factor(k, i, alpha);
    const bool active = !small(ci, sc);
    diag.factors.push_back({k, i, k - i, phi, mag(phi), ci, active});
    diag.min_abs_factor = std::min(diag.min_abs_factor, mag(phi));
  }
  for (const auto& f : diag.factors) {
    if (!f.active) continue;
    const auto kind = classify(f.factor, policy);
    if (!kind) {
      throw NotNijenhuisError("degree " + std::to_string(k) + ": c has " + f.numerator.str() + "·" +
                              monomial_text("u", f.m, "v", f.n) + " with factor " + f.factor.str() +
                              " ≠ 0; the second base equation fails");
    }
    if (!obstruction) {
      obstruction = Obstruction<F>{*kind, k, f.m, f.n, f.factor, diag.factors,
                                   to_string(*kind) + " at degree " + std::to_string(k) + ", monomial " +
                                       monomial_text("u", f.m, "v", f.n) + ": factor i + 1 + α(k − i − 1) = " +
                                       f.factor.str() + " against c = " + f.numerator.str()};
    }
  }
  if (obstruction) return {change, Rk, diag, obstruction};

  const auto [r1, r2] = base_equations_residual(t, alpha);
  if (!small_series(r1, sc * (1.0 + mag(alpha)) * k) || !small_series(r2, sc * (1.0 + mag(alpha)) * k) ||
      !small_series(t.d.derivative(0), sc * k)) {
    throw NotNijenhuisError("degree " + std::to_string(k) + ": base equations do not vanish (" + format_series(r1) +
                            ", " + format_series(r2) + ")");
  }
  if constexpr (!is_exact_field<F>) {
    const Series<F> zero(vars, N, ctx);
    Rk = with_part(Rk, 0, 0, k, zero);
    Rk = with_part(Rk, 1, 0, k, zero);
    Series<F> dv(vars, N, ctx);
    const F dk = t.d.coefficient(mono(0, k));
    if (!dk.is_zero()) dv.add_term(mono(0, k), dk);
    Rk = with_part(Rk, 1, 1, k, dv);
  }
  return {change, Rk, diag, std::nullopt};
}

template <Coefficient F>
NormalFormResult<F> normal_form(const OperatorField<F>& R, const F& alpha, int N, DivisorPolicy policy) {
  require_two_dim(R);
  if (N < 1 || N > R.truncation()) {
    throw DomainError("normal form degree " + std::to_string(N) + " needs truncation ≥ N (have " +
                      std::to_string(R.truncation()) + ")");
  }
  const OperatorField<F> Rn = N == R.truncation() ? R : R.with_truncation(N);
  const F lambda0 = scalar_part(Rn);
  auto [P, cur] = to_template_coordinates(Rn, alpha, lambda0);
  const auto& vars = Rn.vars();
  const auto ctx = Rn.context();
  NormalFormResult<F> out{lambda0, P, FormalChange<F>::identity(vars, N, ctx), cur,
                          Series<F>(vars, N, ctx), Series<F>(vars, N, ctx), {}, std::nullopt};
  for (int k = 2; k <= N; ++k) {
    DegreeStep<F> step = normalize_degree(cur, alpha, k, policy);
    out.degrees.push_back(step.diagnostics);
    if (!step.change.is_identity()) out.change = out.change.then(step.change);
    cur = std::move(step.R);
    if (step.obstruction) {
      out.obstruction = std::move(step.obstruction);
      break;
    }
  }
  out.R = cur;
  const auto S = minus_scalar(cur, lambda0);
  out.p = S(0, 1);
  out.q = S(1, 1);
  return out;
}

template <Coefficient F>
Series<F> eigen_coordinate(const OperatorField<F>& R, const F& alpha) {
  require_two_dim(R);
  if (alpha.is_zero()) throw DomainError("eigen coordinate needs α ≠ 0");
  const int N = R.truncation();
  const auto ctx = R.context();
  const F lambda0 = scalar_part(R);
  const OperatorField<F> S = minus_scalar(R, lambda0).with_truncation(N + 1);
  const Series<F> T = S.trace();
  const Series<F> D = S.determinant();
  const Series<F> ell = T.homogeneous_part(1);
  const F l0 = ell.coefficient(mono(1, 0));
  const F l1 = ell.coefficient(mono(0, 1));
  if (ell.is_zero()) throw DomainError("tr R₁ vanishes; the linear part is not b1 with α ≠ 0");

  Series<F> mu = ell.scaled(ctx.make(1L) / alpha);
  const F a2 = alpha * alpha;
  for (int k = 2; k <= N; ++k) {
    const Series<F> Fk = (mu * mu).scaled(a2) - (T * mu).scaled(alpha) + D;
    const Series<F> P = Fk.homogeneous_part(k + 1).scaled(ctx.make(-1L) / alpha);
    // Solve ℓ·Q = P for Q homogeneous of degree k.
    std::vector<F> p(k + 2, ctx.make(0L)), q(k + 1, ctx.make(0L));
    for (int j = 0; j <= k + 1; ++j) p[j] = P.coefficient(mono(j, k + 1 - j));
    F remainder = ctx.make(0L);
    if (l0.abs() <= l1.abs()) {
      q[0] = p[0] / l1;
      for (int j = 1; j <= k; ++j) q[j] = (p[j] - l0 * q[j - 1]) / l1;
      remainder = p[k + 1] - l0 * q[k];
    } else {
      q[k] = p[k + 1] / l0;
      for (int j = k; j >= 1; --j) q[j - 1] = (p[j] - l1 * q[j]) / l0;
      remainder = p[0] - l1 * q[0];
    }
    if (!small(remainder, 1.0 + max_abs_coefficient(P))) {
      throw DomainError("eigen coordinate: degree " + std::to_string(k + 1) +
                        " equation is not divisible by tr R₁ (remainder " + remainder.str() + ")");
    }
    for (int j = 0; j <= k; ++j) {
      if (!q[j].is_zero()) mu.add_term(mono(j, k - j), q[j]);
    }
  }
  return mu.with_truncation(N);
}

template <Coefficient F>
TriangularForm<F> to_triangular_form(const OperatorField<F>& R, const F& alpha) {
  require_two_dim(R);
  const int N = R.truncation();
  const auto& vars = R.vars();
  const auto ctx = R.context();
  const F lambda0 = scalar_part(R);
  auto [P, moved] = to_template_coordinates(R, alpha, lambda0);
  const Series<F> mu = eigen_coordinate(moved, alpha);
  const Series<F> u = Series<F>::variable(vars, N, 0, ctx);
  const Series<F> v = Series<F>::variable(vars, N, 1, ctx);
  const FormalChange<F> phi = FormalChange<F>::from_forward({u, mu});
  OperatorField<F> T = transform_operator(moved, phi);
  const OperatorField<F> S = minus_scalar(T, lambda0);
  double sc = 1.0;
  for (int d = 0; d <= N; ++d) sc = std::max(sc, scale_of(S, d));
  if (!small_series(S(0, 0), sc) || !small_series(S(1, 0), sc) || !small_series(S(1, 1) - v.scaled(alpha), sc)) {
    throw DomainError("transport by (λ, μ) did not give [[0, h], [0, αμ]]: entries " + format_series(S(0, 0)) +
                      ", " + format_series(S(1, 0)) + ", " + format_series(S(1, 1)));
  }
  if constexpr (!is_exact_field<F>) {
    const Series<F> zero(vars, N, ctx);
    const Series<F> l = Series<F>::constant(vars, N, lambda0);
    T = OperatorField<F>({{l, T(0, 1)}, {zero, l + v.scaled(alpha)}}, T.reliable_degree());
  }
  return {lambda0, P, phi, T, minus_scalar(T, lambda0)(0, 1)};
}

template <Coefficient F>
Linearization<F> linearize_triangular(const Series<F>& h_in, const F& alpha, int N, DivisorPolicy policy) {
  if (h_in.nvars() != 2) throw DomainError("h must be a series in two variables");
  if (N < 1 || N > h_in.truncation()) throw DomainError("linearization degree exceeds the truncation of h");
  const Series<F> h = h_in.with_truncation(N);
  const auto& vars = h.vars();
  const auto ctx = h.context();
  const Series<F> lam = Series<F>::variable(vars, N, 0, ctx);
  const Series<F> mu = Series<F>::variable(vars, N, 1, ctx);
  if (!small_series(h.truncated_to(1) - lam)) {
    throw DomainError("h must be λ + higher order terms, got linear part " + format_series(h.truncated_to(1)));
  }

  Linearization<F> out{{}, lam, {}, std::nullopt, std::numeric_limits<double>::infinity(), 0, 0};
  std::vector<Series<F>> hk(N + 1, Series<F>(vars, N, ctx));
  std::vector<Series<F>> dg(N + 1, Series<F>(vars, N, ctx));
  for (int j = 2; j <= N; ++j) hk[j] = h.homogeneous_part(j);
  double scale = 1.0 + max_abs_coefficient(h);

  for (int k = 2; k <= N; ++k) {
    Series<F> rhs = -hk[k];
    for (int i = 2; i <= k - 1; ++i) {
      if (dg[i].is_zero() || hk[k + 1 - i].is_zero()) continue;
      rhs -= (dg[i] * hk[k + 1 - i]).homogeneous_part(k);
    }
    scale = std::max(scale, max_abs_coefficient(rhs));
    Series<F> gk(vars, N, ctx);
    std::vector<FactorRecord<F>> degree_records;
    std::optional<FactorRecord<F>> bad;
    std::optional<ObstructionKind> bad_kind;
    for (int m = k; m >= 0; --m) {
      const int n = k - m;
      const F numer = rhs.coefficient(mono(m, n));
      const F delta = ctx.make(static_cast<long>(m - 1)) + alpha * ctx.make(static_cast<long>(n));
      const bool active = !small(numer, scale);
      FactorRecord<F> rec{k, m, n, delta, mag(delta), numer, active};
      if (rec.magnitude < out.min_abs_divisor) {
        out.min_abs_divisor = rec.magnitude;
        out.min_m = m;
        out.min_n = n;
      }
      degree_records.push_back(rec);
      if (!active) continue;
      if (const auto kind = classify(delta, policy)) {
        if (!bad) {
          bad = rec;
          bad_kind = kind;
        }
        continue;
      }
      gk.add_term(mono(m, n), numer / delta);
    }
    out.divisors.insert(out.divisors.end(), degree_records.begin(), degree_records.end());
    if (bad) {
      out.obstruction = Obstruction<F>{*bad_kind, k, bad->m, bad->n, bad->factor, degree_records,
                                       to_string(*bad_kind) + " at degree " + std::to_string(k) + ", monomial " +
                                           monomial_text("λ", bad->m, "μ", bad->n) + ": m + αn − 1 = " +
                                           bad->factor.str() + " against " + bad->numerator.str()};
      break;
    }
    dg[k] = gk.derivative(0);
    out.g += gk;
  }
  out.forward = {out.g, mu};
  return out;
}

#define NIJLIN_INSTANTIATE(F)                                                                                 \
  template DegreeSlice<F> slice_of<F>(const OperatorField<F>&, int);                                         \
  template std::pair<Series<F>, Series<F>> base_equations_residual<F>(const DegreeSlice<F>&, const F&);      \
  template DegreeStep<F> normalize_degree<F>(const OperatorField<F>&, const F&, int, DivisorPolicy);         \
  template NormalFormResult<F> normal_form<F>(const OperatorField<F>&, const F&, int, DivisorPolicy);        \
  template Series<F> eigen_coordinate<F>(const OperatorField<F>&, const F&);                                 \
  template TriangularForm<F> to_triangular_form<F>(const OperatorField<F>&, const F&);                       \
  template Linearization<F> linearize_triangular<F>(const Series<F>&, const F&, int, DivisorPolicy);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
