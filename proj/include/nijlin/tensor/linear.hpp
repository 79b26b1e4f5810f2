#pragma once

#include <vector>

#include "nijlin/error.hpp"
#include "nijlin/field/field.hpp"

namespace nijlin {

/// Dense constant matrix, row-major.
template <Coefficient F>
using Matrix = std::vector<std::vector<F>>;

template <Coefficient F>
Matrix<F> identity_matrix(std::size_t n, const typename F::Context& ctx) {
  Matrix<F> m(n, std::vector<F>(n, ctx.make(0L)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = ctx.make(1L);
  return m;
}

template <Coefficient F>
Matrix<F> matrix_product(const Matrix<F>& a, const Matrix<F>& b) {
  if (a.empty() || a.front().size() != b.size()) throw MismatchError("matrix shapes do not match");
  const auto zero = a.front().front().context().make(0L);
  Matrix<F> out(a.size(), std::vector<F>(b.front().size(), zero));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < b.front().size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

/// Gauss-Jordan inverse with partial pivoting on magnitude. Throws
/// DomainError for singular (or, in floats, numerically singular) input.
template <Coefficient F>
Matrix<F> matrix_inverse(const Matrix<F>& m) {
  const std::size_t n = m.size();
  if (n == 0) throw DomainError("empty matrix");
  const auto ctx = m.front().front().context();
  Matrix<F> a = m;
  Matrix<F> inv = identity_matrix<F>(n, ctx);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[pivot][col].abs() < a[r][col].abs()) pivot = r;
    }
    if (negligible(a[pivot][col])) throw DomainError("singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const F p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const F f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace nijlin
