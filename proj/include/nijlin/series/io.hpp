#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "nijlin/series/series.hpp"

namespace nijlin {

using Json = nlohmann::ordered_json;

/// Parses `3/2*x^2*y - y^3` style text. Every variable must appear in
/// `vars`; a coefficient may sit anywhere inside a product. Terms above the
/// truncation order are dropped.
template <Coefficient F>
Series<F> parse_series(std::string_view text, const VarList& vars, int truncation,
                       typename F::Context ctx = {});

/// Canonical text: terms in increasing graded order, `0` for the zero series.
/// Reads back to the identical series in rational mode.
template <Coefficient F>
std::string format_series(const Series<F>& s);

/// `{vars, truncation, terms: [{exp, coef}]}`.
template <Coefficient F>
Json series_to_json(const Series<F>& s);

/// Accepts the structured object, or a plain string in the text grammar
/// (then `vars` and `truncation` come from the caller).
template <Coefficient F>
Series<F> series_from_json(const Json& j, typename F::Context ctx = {});

template <Coefficient F>
Series<F> series_from_json(const Json& j, const VarList& vars, int truncation,
                           typename F::Context ctx = {});

/// Coefficient from a JSON string or number.
template <Coefficient F>
F coefficient_from_json(const Json& j, const typename F::Context& ctx);

}  // namespace nijlin
