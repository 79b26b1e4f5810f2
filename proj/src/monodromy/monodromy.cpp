#include "nijlin/monodromy/monodromy.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "nijlin/error.hpp"

namespace nijlin {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<Complex>;

/// Integrates y' = f(s, y) for s ∈ [0, 1] with a controlled Dormand–Prince
/// pair. `check` runs after every accepted step.
template <class Rhs, class Check>
State integrate_unit(Rhs&& f, State y, double abs_tol, double rel_tol, double min_step, Check&& check) {
  auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  const double tol = std::max(abs_tol, rel_tol);
  auto sys = [&](const State& x, State& dx, double s) { f(s, x, dx); };
  double s = 0.0, ds = std::min(0.01, std::sqrt(tol));
  while (s < 1.0) {
    if (s + ds > 1.0) ds = 1.0 - s;
    const double before = s;
    if (stepper.try_step(sys, y, s, ds) == odeint::success) {
      check(y);
      continue;
    }
    if (ds < min_step && 1.0 - before > min_step) throw IntegrationError("step size underflow at s = " + std::to_string(before));
  }
  return y;
}

}  // namespace

void ComplexPolynomial::add(int i, int j, Complex c) {
  if (i < 0 || j < 0) throw DomainError("negative exponent");
  if (static_cast<int>(rows_.size()) <= i) rows_.resize(i + 1);
  auto& row = rows_[i];
  if (static_cast<int>(row.size()) <= j) row.resize(j + 1, Complex(0.0, 0.0));
  row[j] += c;
}

Complex ComplexPolynomial::operator()(Complex u, Complex v) const {
  Complex out(0.0, 0.0);
  for (auto i = rows_.size(); i-- > 0;) {
    Complex inner(0.0, 0.0);
    for (auto j = rows_[i].size(); j-- > 0;) inner = inner * v + rows_[i][j];
    out = out * u + inner;
  }
  return out;
}

ComplexPoint integrate_complex(const ComplexPolynomial& h, Complex alpha, ComplexPoint start, const TimePath& path,
                               const IntegrationOptions& options) {
  ComplexPoint p = start;
  auto check = [&](const State& y) {
    if (!std::isfinite(std::abs(y[0])) || !std::isfinite(std::abs(y[1])) || std::abs(y[0]) > options.domain_radius ||
        std::abs(y[1]) > options.domain_radius) {
      throw IntegrationError("the flow left the domain |u|, |v| ≤ " + std::to_string(options.domain_radius));
    }
  };
  for (std::size_t s = 0; s + 1 < path.vertices.size(); ++s) {
    const Complex dt = path.vertices[s + 1] - path.vertices[s];
    if (std::abs(dt) == 0.0) continue;
    auto rhs = [&](double, const State& y, State& dy) {
      dy.resize(2);
      dy[0] = dt * h(y[0], y[1]);
      dy[1] = dt * alpha * y[1];
    };
    const State y = integrate_unit(rhs, State{p.u, p.v}, options.tol, options.tol, options.min_step, check);
    p = {y[0], y[1]};
  }
  return p;
}

std::vector<MonodromySample> monodromy_map(const ComplexPolynomial& h, Complex alpha, const LoopSpec& loop,
                                           const std::vector<Complex>& z0s) {
  if (!(loop.radius > 0.0)) throw DomainError("loop radius must be positive");
  if (loop.radius >= loop.domain_radius) throw DomainError("loop radius must be inside the domain");
  if (loop.winding < 1) throw DomainError("winding must be positive");
  if (loop.segments < 1) throw DomainError("at least one segment is needed");
  if (!(loop.tol > 0.0)) throw DomainError("tolerance must be positive");
  const double total = 2.0 * std::numbers::pi * loop.winding;
  const double eps = loop.radius;

  auto lift = [&](Complex z0, double tol) {
    Complex v = z0;
    auto check = [&](const State& y) {
      if (!std::isfinite(std::abs(y[0])) || std::abs(y[0]) > loop.domain_radius) {
        throw IntegrationError("lift left the transversal neighbourhood |v| ≤ " + std::to_string(loop.domain_radius));
      }
    };
    for (int s = 0; s < loop.segments; ++s) {
      const double th0 = total * s / loop.segments;
      const double dth = total / loop.segments;
      auto rhs = [&](double x, const State& y, State& dy) {
        const Complex u = eps * std::exp(Complex(0.0, th0 + x * dth));
        const Complex hv = h(u, y[0]);
        if (std::abs(hv) < 1e-300) throw IntegrationError("h vanishes on the lift");
        dy.resize(1);
        dy[0] = dth * Complex(0.0, 1.0) * u * alpha * y[0] / hv;
      };
      // v stays proportional to z₀ to first order, so the error is measured
      // relative to |z₀|.
      v = integrate_unit(rhs, State{v}, tol * std::max(std::abs(z0), 1e-300), tol, 1e-14, check)[0];
    }
    return v;
  };

  std::vector<MonodromySample> out;
  out.reserve(z0s.size());
  for (const Complex z0 : z0s) {
    MonodromySample s{z0, Complex(0.0, 0.0), 0.0, false, std::nullopt};
    try {
      const Complex coarse = lift(z0, loop.tol);
      const Complex fine = lift(z0, loop.tol / 32.0);
      s.z1 = fine;
      s.error = std::abs(fine - coarse);
      s.flagged = s.error > loop.tol * std::abs(z0) * total;
    } catch (const IntegrationError& e) {
      s.failure = e.what();
      s.flagged = true;
    }
    out.push_back(s);
  }
  return out;
}

MultiplierFit germ_multiplier(const std::vector<MonodromySample>& samples) {
  std::vector<const MonodromySample*> usable;
  for (const auto& s : samples)
    if (!s.failure && std::abs(s.z0) > 0.0) usable.push_back(&s);
  std::sort(usable.begin(), usable.end(),
            [](const MonodromySample* a, const MonodromySample* b) { return std::abs(a->z0) < std::abs(b->z0); });
  std::vector<double> radii;
  for (const auto* s : usable) radii.push_back(std::abs(s->z0));
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.size() < 3) throw DomainError("multiplier fit needs at least three samples with distinct nonzero |z0|");
  const std::size_t used = std::max<std::size_t>(3, usable.size() / 2);
  Complex num(0.0, 0.0);
  double den = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    num += std::conj(usable[i]->z0) * usable[i]->z1;
    den += std::norm(usable[i]->z0);
  }
  const Complex m = num / den;
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    res += std::norm(usable[i]->z1 - m * usable[i]->z0);
    scale += std::norm(usable[i]->z1);
  }
  return {m, scale > 0.0 ? std::sqrt(res / scale) : std::sqrt(res), used};
}

Complex linear_multiplier(double alpha, int winding) {
  return std::exp(Complex(0.0, 2.0 * std::numbers::pi * alpha * winding));
}

}  // namespace nijlin
