#pragma once

#include "nijlin/lsa/lsa.hpp"
#include "nijlin/series/io.hpp"

namespace nijlin {

/// `{dim, a: [[[coef…]…]…]}`, index order [k][i][j].
template <Coefficient F>
Json lsa_to_json(const Lsa<F>& A);

/// Coefficients may be strings or numbers.
template <Coefficient F>
Lsa<F> lsa_from_json(const Json& j, typename F::Context ctx = {});

template <Coefficient F>
Json matrix_to_json(const Matrix<F>& m);

/// `{label, family, params}`; params holds alpha or beta when present.
Json label_to_json(const ClassLabel& label);

template <Coefficient F>
Json identification_to_json(const Identification<F>& id);

/// `{label, params, category, verdict, evidence, …}`.
Json verdict_to_json(const Verdict& v);

}  // namespace nijlin
