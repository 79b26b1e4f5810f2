#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nijlin/error.hpp"
#include "nijlin/series/series.hpp"

namespace nijlin {

using Complex = std::complex<double>;

struct ComplexPoint {
  Complex u;
  Complex v;
};

/// A two-variable polynomial with complex double coefficients, evaluated by
/// Horner's rule in v then u.
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  template <Coefficient F>
  explicit ComplexPolynomial(const Series<F>& s) {
    if (s.nvars() != 2) throw DomainError("h must be a series in two variables");
    for (const auto& [m, c] : s.terms()) add(m[0], m[1], Complex(c.to_double(), 0.0));
  }
  void add(int i, int j, Complex c);
  Complex operator()(Complex u, Complex v) const;
  bool empty() const { return rows_.empty(); }

 private:
  /// rows_[i][j] multiplies u^i v^j.
  std::vector<std::vector<Complex>> rows_;
};

/// Straight complex-time segments through the listed vertices.
struct TimePath {
  std::vector<Complex> vertices;
};

struct IntegrationOptions {
  double tol = 1e-9;
  /// The flow must stay inside |u|, |v| ≤ domain_radius.
  double domain_radius = 10.0;
  /// Smallest step, relative to the path length, before giving up.
  double min_step = 1e-14;
};

/// Step-size underflow or escape from the domain.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Flow of u̇ = h(u, v), v̇ = αv along a complex time path.
ComplexPoint integrate_complex(const ComplexPolynomial& h, Complex alpha, ComplexPoint start, const TimePath& path,
                               const IntegrationOptions& options = {});

struct LoopSpec {
  /// Radius ε of the base circle |u| = ε on the separatrix v = 0.
  double radius = 0.1;
  int segments = 8;
  double tol = 1e-9;
  /// Full turns in the positive direction.
  int winding = 1;
  double domain_radius = 1.0;
};

struct MonodromySample {
  Complex z0;
  Complex z1;
  /// |z₁(tol) − z₁(tol/32)|, the finer value being reported.
  double error;
  /// Set when the error estimate exceeds tol·|z₀|·(loop length).
  bool flagged;
  /// Set when the lift left the domain; z1 is then meaningless.
  std::optional<std::string> failure;
};

/// Lifts the loop u = ε e^{iθ}, θ ∈ [0, 2π·winding], to the leaf through
/// (ε, z₀). Along the lift dv/dθ = iu·αv / h(u, v), which is the flow of the
/// system reparametrized so that the base point follows the loop.
std::vector<MonodromySample> monodromy_map(const ComplexPolynomial& h, Complex alpha, const LoopSpec& loop,
                                           const std::vector<Complex>& z0s);

struct MultiplierFit {
  Complex multiplier;
  /// ‖z₁ − m z₀‖ / ‖z₁‖ over the samples used.
  double residual;
  std::size_t used;
};

/// Least-squares fit z₁ ≈ m z₀ over the smallest half (at least three) of the
/// usable samples. Throws DomainError with fewer than three distinct nonzero
/// |z₀|.
MultiplierFit germ_multiplier(const std::vector<MonodromySample>& samples);

/// e^{2πiα}.
Complex linear_multiplier(double alpha, int winding = 1);

}  // namespace nijlin
