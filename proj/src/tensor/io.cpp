#include "nijlin/tensor/io.hpp"

#include "nijlin/error.hpp"

namespace nijlin {

template <Coefficient F>
Json operator_to_json(const OperatorField<F>& R) {
  Json rows = Json::array();
  for (const auto& row : R.rows()) {
    Json r = Json::array();
    for (const auto& s : row) r.push_back(format_series(s));
    rows.push_back(std::move(r));
  }
  return Json{{"vars", R.vars()}, {"truncation", R.truncation()}, {"entries", std::move(rows)}};
}

template <Coefficient F>
OperatorField<F> operator_from_json(const Json& j, typename F::Context ctx) {
  try {
    const auto vars = j.at("vars").get<VarList>();
    const int n = j.at("truncation").get<int>();
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != vars.size()) {
      throw ParseError("operator entries must be a square array matching the variables", 0);
    }
    std::vector<std::vector<Series<F>>> rows;
    for (const auto& row : entries) {
      if (!row.is_array() || row.size() != vars.size()) throw ParseError("operator row has the wrong length", 0);
      std::vector<Series<F>> r;
      for (const auto& e : row) r.push_back(series_from_json<F>(e, vars, n, ctx));
      rows.push_back(std::move(r));
    }
    return OperatorField<F>(std::move(rows));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad operator object: ") + e.what(), 0);
  }
}

template <Coefficient F>
Json two_form_to_json(const TwoFormValued<F>& T, const VarList& vars) {
  Json comps = Json::object();
  for (std::size_t i = 0; i < T.dim(); ++i) {
    for (std::size_t j = i + 1; j < T.dim(); ++j) {
      for (std::size_t k = 0; k < T.dim(); ++k) {
        comps[std::to_string(k) + ";" + std::to_string(i) + "," + std::to_string(j)] = format_series(T(k, i, j));
      }
    }
  }
  return Json{{"vars", vars}, {"reliable_degree", T.reliable_degree()}, {"components", std::move(comps)}};
}

template <Coefficient F>
Json vector_field_to_json(const VectorField<F>& v) {
  Json c = Json::array();
  for (const auto& s : v.components()) c.push_back(format_series(s));
  return Json{{"vars", v.vars()}, {"truncation", v.truncation()}, {"components", std::move(c)}};
}

#define NIJLIN_INSTANTIATE(F)                                                       \
  template Json operator_to_json<F>(const OperatorField<F>&);                      \
  template OperatorField<F> operator_from_json<F>(const Json&, F::Context);        \
  template Json two_form_to_json<F>(const TwoFormValued<F>&, const VarList&);      \
  template Json vector_field_to_json<F>(const VectorField<F>&);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
