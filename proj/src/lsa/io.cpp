#include "nijlin/lsa/io.hpp"

#include "nijlin/brjuno/io.hpp"
#include "nijlin/error.hpp"

namespace nijlin {

template <Coefficient F>
Json lsa_to_json(const Lsa<F>& A) {
  Json a = Json::array();
  for (std::size_t k = 0; k < A.dim(); ++k) {
    Json plane = Json::array();
    for (std::size_t i = 0; i < A.dim(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < A.dim(); ++j) row.push_back(A(k, i, j).str());
      plane.push_back(std::move(row));
    }
    a.push_back(std::move(plane));
  }
  return {{"dim", A.dim()}, {"a", std::move(a)}};
}

template <Coefficient F>
Lsa<F> lsa_from_json(const Json& j, typename F::Context ctx) {
  try {
    const auto& a = j.at("a");
    const std::size_t n = j.contains("dim") ? j.at("dim").get<std::size_t>() : a.size();
    if (a.size() != n) throw ParseError("LSA table has " + std::to_string(a.size()) + " planes, dim is " + std::to_string(n), 0);
    Lsa<F> A(n, ctx);
    for (std::size_t k = 0; k < n; ++k) {
      if (a[k].size() != n) throw ParseError("LSA plane " + std::to_string(k) + " is not n×n", 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (a[k][i].size() != n) throw ParseError("LSA row is not of length n", 0);
        for (std::size_t j2 = 0; j2 < n; ++j2) A.set(k, i, j2, coefficient_from_json<F>(a[k][i][j2], ctx));
      }
    }
    return A;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad LSA object: ") + e.what(), 0);
  }
}

template <Coefficient F>
Json matrix_to_json(const Matrix<F>& m) {
  Json out = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(x.str());
    out.push_back(std::move(r));
  }
  return out;
}

Json label_to_json(const ClassLabel& label) {
  Json params = Json::object();
  if (label.param) params[label.family == Family::b1 ? "alpha" : "beta"] = alpha_to_json(*label.param);
  Json j{{"label", label.str()}, {"family", to_string(label.family)}, {"params", std::move(params)}};
  if (label.c1_alias) j["alias"] = "input spelled c1; the template list has c0 for the zero algebra";
  return j;
}

template <Coefficient F>
Json identification_to_json(const Identification<F>& id) {
  Json j;
  j["status"] = to_string(id.status);
  if (id.label) {
    const Json l = label_to_json(*id.label);
    j["label"] = l.at("label");
    j["family"] = l.at("family");
    j["params"] = l.at("params");
  } else {
    j["label"] = nullptr;
  }
  j["witness"] = id.witness ? matrix_to_json(*id.witness) : Json(nullptr);
  j["change"] = id.change ? matrix_to_json(*id.change) : Json(nullptr);
  j["verified"] = id.verified;
  j["residual"] = id.residual;
  j["tolerance"] = id.tolerance;
  Json tf = Json::array(), df = Json::array();
  for (const auto& x : id.trace_form) tf.push_back(x.str());
  for (const auto& x : id.det_form) df.push_back(x.str());
  j["trace_form"] = std::move(tf);
  j["det_form"] = std::move(df);
  j["symmetry_used"] = "none";
  if (id.violation) j["violation"] = {(*id.violation)[0], (*id.violation)[1], (*id.violation)[2]};
  if (!id.note.empty()) j["note"] = id.note;
  return j;
}

Json verdict_to_json(const Verdict& v) {
  const Json l = label_to_json(v.label);
  Json j;
  j["label"] = l.at("label");
  j["params"] = l.at("params");
  j["category"] = to_string(v.category);
  j["verdict"] = to_string(v.outcome);
  j["evidence"] = v.evidence;
  if (v.sigma) j["sigma"] = sigma_to_json(*v.sigma);
  if (v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
  if (v.label.family == Family::c0) {
    j["alias"] = "verdict tables list c1 where the template list has c0; both name the zero algebra here";
  }
  return j;
}

#define NIJLIN_INSTANTIATE(F)                                          \
  template Json lsa_to_json<F>(const Lsa<F>&);                         \
  template Lsa<F> lsa_from_json<F>(const Json&, F::Context);           \
  template Json matrix_to_json<F>(const Matrix<F>&);                   \
  template Json identification_to_json<F>(const Identification<F>&);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
