#include "nijlin/brjuno/io.hpp"

namespace nijlin {

namespace {

std::string kind_name(ContinuedFraction::Kind k) {
  switch (k) {
    case ContinuedFraction::Kind::Finite: return "finite";
    case ContinuedFraction::Kind::Periodic: return "periodic";
    case ContinuedFraction::Kind::Growth: return "growth";
  }
  return "?";
}

}  // namespace

Json cf_to_json(const ContinuedFraction& cf, std::size_t depth) {
  Json j;
  j["notation"] = cf.notation();
  j["kind"] = kind_name(cf.kind());
  j["sign"] = cf.sign();
  j["a0"] = cf.a0().get_str();
  Json qs = Json::array();
  Json cs = Json::array();
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto c = cf.convergent(n);
    if (!c) break;
    if (n >= 1) qs.push_back(cf.quotient(n)->get_str());
    cs.push_back({{"n", n}, {"p", c->p.get_str()}, {"q", c->q.get_str()}});
  }
  j["quotients"] = std::move(qs);
  j["convergents"] = std::move(cs);
  if (cf.truncated()) j["truncated"] = cf.truncation_note();
  return j;
}

Json partial_sums_to_json(const std::vector<BrjunoPartialSum>& sums) {
  Json out = Json::array();
  for (const auto& s : sums) {
    out.push_back({{"n", s.n}, {"value", s.value}, {"term", s.term}, {"lower_bound", s.lower_bound}});
  }
  return out;
}

Json certificate_to_json(const BrjunoCertificate& cert) {
  Json j;
  j["decision"] = to_string(cert.decision);
  j["reason"] = cert.reason;
  j["depth"] = cert.depth;
  j["threshold_depth"] = cert.threshold_depth ? Json(*cert.threshold_depth) : Json(nullptr);
  j["partial_sums"] = partial_sums_to_json(cert.partial_sums);
  return j;
}

Json sigma_to_json(const SigmaFlags& flags) {
  return {{"in_sigma_sm", to_string(flags.in_sigma_sm)},
          {"in_sigma_an", to_string(flags.in_sigma_an)},
          {"reason", flags.reason}};
}

Json alpha_to_json(const Alpha& a) {
  Json j;
  j["value"] = a.describe();
  j["kind"] = a.is_rational() ? "rational" : a.is_float() ? "float" : "continued_fraction";
  j["approx"] = a.to_double();
  if (const auto* f = std::get_if<BigFloat>(&a.value)) j["bits"] = f->precision();
  return j;
}

}  // namespace nijlin
