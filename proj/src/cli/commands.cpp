#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "nijlin/brjuno/io.hpp"
#include "nijlin/cli/cli.hpp"
#include "nijlin/error.hpp"
#include "nijlin/lsa/io.hpp"
#include "nijlin/monodromy/monodromy.hpp"
#include "nijlin/normalform/normalform.hpp"
#include "nijlin/tensor/io.hpp"

namespace nijlin::cli {

namespace {

constexpr const char* kEmbeddedDefaults =
#include "defaults.json.inc"
    ;

void merge_into(Json& base, const Json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << content;
}

/// JSON number, or null when not finite.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

/// Collects what goes into the input digest and assembles the envelope.
class Envelope {
 public:
  Envelope(const Options& o, std::string command, std::string mode)
      : o_(o), command_(std::move(command)), mode_(std::move(mode)), start_(std::chrono::steady_clock::now()) {}

  void arg(const std::string& key, const Json& value) { args_[key] = value; }
  void file(const std::string& path, const std::string& content) {
    files_.push_back(Json{{"path", path}, {"sha256", sha256_hex(content)}});
  }

  Report finish(const std::string& outcome, Json result, Json diagnostics, std::string text,
                std::optional<Json> error = std::nullopt, int code = 0) const {
    Json j;
    j["schema"] = kReportSchema;
    j["command"] = command_;
    Json material{{"command", command_}, {"mode", mode_}, {"args", args_}, {"files", files_}};
    j["inputs"] = Json{{"digest", "sha256:" + sha256_hex(material.dump())}, {"args", args_}, {"files", files_}};
    j["mode"] = mode_;
    j["outcome"] = outcome;
    j["result"] = std::move(result);
    j["diagnostics"] = std::move(diagnostics);
    if (error) j["error"] = *error;
    if (o_.timing) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      j["timing"] = Json{{"elapsed_seconds", s}};
    }
    return {std::move(j), std::move(text), code};
  }

  Report ok(Json result, Json diagnostics, std::string text) const {
    return finish("ok", std::move(result), std::move(diagnostics), std::move(text));
  }
  Report fail(const std::string& kind, const std::string& message, Json result = Json::object(),
              Json diagnostics = Json::object(), int code = 1) const {
    return finish("error", std::move(result), std::move(diagnostics), "error (" + kind + "): " + message + "\n",
                  Json{{"kind", kind}, {"message", message}}, code);
  }

 private:
  const Options& o_;
  std::string command_;
  std::string mode_;
  Json args_ = Json::object();
  Json files_ = Json::array();
  std::chrono::steady_clock::time_point start_;
};

/// `rational` or `float:bits`.
std::optional<mpfr_prec_t> float_bits(const Options& o) {
  if (o.mode == "rational") return std::nullopt;
  if (o.mode == "float") return o.config.at("float_bits").get<long>();
  if (o.mode.rfind("float:", 0) == 0) {
    try {
      const long bits = std::stol(o.mode.substr(6));
      if (bits < 53 || bits > 65536) throw DomainError("float precision must be in 53 … 65536 bits");
      return bits;
    } catch (const std::logic_error&) {
      throw ParseError("bad precision in mode '" + o.mode + "'", 6);
    }
  }
  throw ParseError("mode must be rational or float[:bits], got '" + o.mode + "'", 0);
}

/// Mode label for the report; a bad mode string is echoed and rejected later.
std::string mode_name(const Options& o) {
  try {
    const auto bits = float_bits(o);
    return bits ? "float:" + std::to_string(*bits) : "rational";
  } catch (const Error&) {
    return o.mode;
  }
}

/// Runs `fn` with the coefficient context of the active mode.
template <class Fn>
Report with_mode(const Options& o, Fn&& fn) {
  if (const auto bits = float_bits(o)) return fn(BigFloat::Context{*bits});
  return fn(Rational::Context{});
}

int default_degree(const Options& o) { return o.degree.value_or(o.config.at("degree").get<int>()); }

/// `template:<label>` or a JSON operator file.
template <Coefficient F>
OperatorField<F> load_operator(const Options& o, Envelope& env, const std::string& spec, const std::string& role,
                               typename F::Context ctx) {
  env.arg(role, spec);
  if (spec.rfind("template:", 0) == 0) {
    const auto label = ClassLabel::parse(spec.substr(9), float_bits(o));
    return template_operator<F>(label, default_vars(2), default_degree(o), ctx);
  }
  const std::string text = read_file(spec);
  env.file(spec, text);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("operator file is not JSON: ") + e.what(), e.byte);
  }
  auto R = operator_from_json<F>(j, ctx);
  if (o.degree) {
    if (*o.degree > R.truncation()) {
      throw DomainError("--degree " + std::to_string(*o.degree) + " exceeds the file's truncation " +
                        std::to_string(R.truncation()));
    }
    R = R.with_truncation(*o.degree);
  }
  return R;
}

template <Coefficient F>
Json witness_json(const NijenhuisCheck& c, const VarList& vars) {
  if (!c.witness) return nullptr;
  const auto& w = *c.witness;
  return Json{{"degree", w.degree},
              {"component", Json{{"k", w.k}, {"i", w.i}, {"j", w.j}}},
              {"vectors", Json::array({vars[w.i], vars[w.j]})},
              {"coefficient", w.coefficient}};
}

template <Coefficient F>
Json factor_json(const FactorRecord<F>& f) {
  return Json{{"degree", f.degree},         {"m", f.m},     {"n", f.n}, {"factor", f.factor.str()},
              {"magnitude", num(f.magnitude)}, {"numerator", f.numerator.str()}, {"active", f.active}};
}

template <Coefficient F>
Json obstruction_json(const Obstruction<F>& ob) {
  Json factors = Json::array();
  for (const auto& f : ob.factors) factors.push_back(factor_json(f));
  return Json{{"kind", to_string(ob.kind)}, {"degree", ob.degree},   {"monomial", Json::array({ob.m, ob.n})},
              {"factor", ob.factor.str()},  {"factors", factors},    {"message", ob.message}};
}

template <Coefficient F>
Json change_json(const FormalChange<F>& phi) {
  Json steps = Json::array();
  for (const auto& s : phi.steps()) {
    Json parts = Json::array();
    for (const auto& p : s.parts) parts.push_back(format_series(p));
    steps.push_back(Json{{"degree", s.degree}, {"parts", parts}});
  }
  Json fwd = Json::array();
  for (const auto& s : phi.forward()) fwd.push_back(format_series(s));
  return Json{{"vars", phi.vars()}, {"truncation", phi.truncation()}, {"identity", phi.is_identity()},
              {"steps", steps},     {"forward", fwd}};
}

std::string mono_text(const VarList& vars, int m, int n) {
  std::string s;
  auto add = [&](const std::string& v, int e) {
    if (e == 0) return;
    if (!s.empty()) s += "*";
    s += e == 1 ? v : v + "^" + std::to_string(e);
  };
  add(vars[0], m);
  add(vars[1], n);
  return s.empty() ? "1" : s;
}

/// Turns library exceptions into error reports.
template <class Fn>
Report guarded(const Envelope& env, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    return env.fail("ParseError", e.what(), Json::object(), Json{{"position", e.position()}});
  } catch (const NotNijenhuisError& e) {
    return env.fail("NotNijenhuis", e.what());
  } catch (const MismatchError& e) {
    return env.fail("MismatchError", e.what());
  } catch (const IntegrationError& e) {
    return env.fail("IntegrationError", e.what());
  } catch (const DomainError& e) {
    return env.fail("DomainError", e.what());
  } catch (const Error& e) {
    return env.fail("Error", e.what());
  }
}

DivisorPolicy policy_from(const Options& o, std::optional<long> floor_log2) {
  DivisorPolicy p;
  p.divisor_floor_log2 = floor_log2.value_or(o.config.at("normalform").at("divisor_floor_log2").get<long>());
  p.hard_floor_margin = o.config.at("normalform").at("hard_floor_margin").get<long>();
  return p;
}

BrjunoPolicy brjuno_policy(const Options& o, std::optional<std::size_t> depth, std::optional<double> threshold) {
  BrjunoPolicy p;
  p.depth = depth.value_or(o.config.at("brjuno").at("depth").get<std::size_t>());
  p.divergence_threshold = threshold.value_or(o.config.at("brjuno").at("divergence_threshold").get<double>());
  return p;
}

}  // namespace

Json load_config(const std::optional<std::string>& override_path) {
  Json config = Json::parse(kEmbeddedDefaults);
  if (override_path) {
    try {
      merge_into(config, Json::parse(read_file(*override_path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("config file is not JSON: " + std::string(e.what()), e.byte);
    }
  }
  return config;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

Report cmd_torsion(const Options& o, const std::string& input) {
  Envelope env(o, "torsion", mode_name(o));
  return guarded(env, [&] {
    return with_mode(o, [&](auto ctx) {
    using F = decltype(ctx.make(1L));
    const auto R = load_operator<F>(o, env, input, "input", ctx);
    const auto T = nijenhuis_torsion(R);
    const int through = T.reliable_degree();
    const auto check = torsion_check(T, through);
    Json result{{"nijenhuis", check.nijenhuis},
                {"checked_through", check.checked_through},
                {"witness", witness_json<F>(check, R.vars())},
                {"operator", operator_to_json(R)},
                {"torsion", two_form_to_json(T.truncated_to(through), R.vars())}};
    std::string text;
    if (check.nijenhuis) {
      text = "Nijenhuis through degree " + std::to_string(check.checked_through) + "\n";
    } else {
      const auto& w = *check.witness;
      text = "not Nijenhuis: component " + std::to_string(w.k) + " of N(d/d" + R.vars()[w.i] + ", d/d" +
             R.vars()[w.j] + ") has degree-" + std::to_string(w.degree) + " coefficient " + w.coefficient + "\n";
    }
    return env.ok(std::move(result), Json{{"reliable_degree", through}}, std::move(text));
  });
  });
}

Report cmd_bracket(const Options& o, const std::string& first, const std::string& second) {
  Envelope env(o, "bracket", mode_name(o));
  return guarded(env, [&] {
    return with_mode(o, [&](auto ctx) {
    using F = decltype(ctx.make(1L));
    const auto R = load_operator<F>(o, env, first, "first", ctx);
    const auto Q = load_operator<F>(o, env, second, "second", ctx);
    const auto T = fn_bracket(R, Q);
    const int through = T.reliable_degree();
    const auto Tt = T.truncated_to(through);
    Json result{{"zero", Tt.is_zero()}, {"bracket", two_form_to_json(Tt, R.vars())}};
    std::ostringstream text;
    text << "[[R, Q]] through degree " << through << (Tt.is_zero() ? ": zero\n" : ":\n");
    if (!Tt.is_zero()) {
      for (const auto& [key, value] : result["bracket"]["components"].items()) {
        text << "  " << key << ": " << value.template get<std::string>() << "\n";
      }
    }
    return env.ok(std::move(result), Json{{"reliable_degree", through}}, text.str());
  });
  });
}

Report cmd_classify(const Options& o, const ClassifyArgs& a) {
  Envelope env(o, "classify", mode_name(o));
  if (!a.input && !a.label) return env.fail("UsageError", "classify needs an operator input or --label");
  return guarded(env, [&] {
    return with_mode(o, [&](auto ctx) {
    using F = decltype(ctx.make(1L));
    Json result = Json::object();
    std::optional<ClassLabel> label;
    if (a.label) {
      env.arg("label", *a.label);
      label = ClassLabel::parse(*a.label, float_bits(o));
    } else {
      const auto R = load_operator<F>(o, env, *a.input, "input", ctx);
      std::vector<F> base;
      if (a.basepoint) {
        env.arg("basepoint", *a.basepoint);
        std::stringstream ss(*a.basepoint);
        std::string item;
        while (std::getline(ss, item, ',')) base.push_back(param_value<F>(parse_alpha(item, float_bits(o)), ctx));
        if (base.size() != R.dim()) throw ParseError("basepoint needs " + std::to_string(R.dim()) + " coordinates", 0);
      }
      const auto A = extract_linear_lsa(R, std::span<const F>(base));
      Tolerance tol{a.tolerance.value_or(o.config.at("lsa").at("tolerance").get<double>())};
      if (a.tolerance) env.arg("tolerance", *a.tolerance);
      result["lsa"] = lsa_to_json(A);
      const auto id = identify_2d(A, tol);
      result["identification"] = identification_to_json(id);
      if (id.status == IdentifyStatus::NotLeftSymmetric) {
        std::string where;
        if (id.violation) {
          where = " at basis triple (" + std::to_string((*id.violation)[0]) + ", " +
                  std::to_string((*id.violation)[1]) + ", " + std::to_string((*id.violation)[2]) + ")";
        }
        return env.fail("NotLeftSymmetric", "the associator is not symmetric in its first two arguments" + where,
                        std::move(result));
      }
      if (id.status == IdentifyStatus::UnclassifiedAtTolerance || !id.label) {
        return env.fail("UnclassifiedAtTolerance", id.note.empty() ? "no label at this tolerance" : id.note,
                        std::move(result));
      }
      label = *id.label;
    }
    std::optional<BrjunoCertificate> cert;
    if (label->param && label->param->is_cf()) {
      cert = brjuno_decide(std::get<ContinuedFraction>(label->param->value), brjuno_policy(o, std::nullopt, std::nullopt));
    }
    const auto smooth = degeneracy_verdict(*label, Category::Smooth, cert);
    const auto analytic = degeneracy_verdict(*label, Category::Analytic, cert);
    result["label"] = label_to_json(*label);
    result["verdicts"] = Json{{"smooth", verdict_to_json(smooth)}, {"analytic", verdict_to_json(analytic)}};
    std::string text = "label " + label->str() + "\n" + "smooth: " + to_string(smooth.outcome) + " (" +
                       smooth.evidence + ")\n" + "analytic: " + to_string(analytic.outcome) + " (" +
                       analytic.evidence + ")\n";
    return env.ok(std::move(result), Json::object(), std::move(text));
  });
  });
}

Report cmd_normalize(const Options& o, const NormalizeArgs& a) {
  Envelope env(o, "normalize", mode_name(o));
  env.arg("alpha", a.alpha);
  if (a.divisor_floor_log2) env.arg("divisor_floor_log2", *a.divisor_floor_log2);
  if (!a.input && !a.h) return env.fail("UsageError", "normalize needs an operator input or --h");
  return guarded(env, [&] {
    return with_mode(o, [&](auto ctx) -> Report {
    using F = decltype(ctx.make(1L));
    const Alpha alpha_spec = parse_alpha(a.alpha, float_bits(o));
    if constexpr (is_exact_field<F>) {
      if (!alpha_spec.is_rational()) {
        throw DomainError("α = " + alpha_spec.describe() + " is not rational; use --mode float[:bits]");
      }
    }
    const F alpha = param_value<F>(alpha_spec, ctx);
    const DivisorPolicy policy = policy_from(o, a.divisor_floor_log2);
    Json result{{"alpha", alpha_to_json(alpha_spec)}};
    Json diagnostics = Json::object();
    std::ostringstream text;

    auto linearize = [&](const Series<F>& h, int N) -> std::optional<Obstruction<F>> {
      const auto lin = linearize_triangular(h, alpha, N, policy);
      Json d{{"count", lin.divisors.size()},
             {"min_abs_divisor", num(lin.min_abs_divisor)},
             {"min_monomial", Json::array({lin.min_m, lin.min_n})},
             {"g", format_series(lin.g)}};
      if (a.divisor_log) {
        Json log = Json::array();
        for (const auto& f : lin.divisors) log.push_back(factor_json(f));
        d["log"] = std::move(log);
      }
      if (lin.obstruction) d["obstruction"] = obstruction_json(*lin.obstruction);
      result["linearization"] = std::move(d);
      text << "linearization through degree " << N << ": min |m + αn − 1| = " << lin.min_abs_divisor << " at "
           << mono_text(h.vars(), lin.min_m, lin.min_n) << "\n";
      return lin.obstruction;
    };

    auto obstructed = [&](const Obstruction<F>& ob) {
      text << ob.message << "\n";
      return env.finish("error", std::move(result), std::move(diagnostics), text.str(),
                        Json{{"kind", to_string(ob.kind)}, {"message", ob.message}}, 3);
    };

    if (a.h) {
      env.arg("h", *a.h);
      const int N = default_degree(o);
      const auto h = parse_series<F>(*a.h, default_vars(2), N, ctx);
      result["h"] = format_series(h);
      if (const auto ob = linearize(h, N)) return obstructed(*ob);
      return env.ok(std::move(result), std::move(diagnostics), text.str());
    }

    const auto R = load_operator<F>(o, env, *a.input, "input", ctx);
    const int N = R.truncation();
    const auto res = normal_form(R, alpha, N, policy);
    result["lambda0"] = res.lambda0.str();
    result["linear"] = matrix_to_json(res.linear);
    result["normal_form"] = operator_to_json(res.R);
    result["p"] = format_series(res.p);
    result["q"] = format_series(res.q);
    result["change"] = change_json(res.change);
    Json degrees = Json::array();
    text << "degree  removed  min|factor|\n";
    for (const auto& d : res.degrees) {
      Json removed = Json::array(), gs = Json::array(), factors = Json::array();
      for (const auto& [i, j] : d.removed) removed.push_back(mono_text(R.vars(), i, j));
      for (const auto& g : d.g_coefficients) gs.push_back(g.str());
      for (const auto& f : d.factors) factors.push_back(factor_json(f));
      degrees.push_back(Json{{"degree", d.degree},
                             {"removed", removed},
                             {"g_coefficients", gs},
                             {"factors", factors},
                             {"min_abs_factor", num(d.min_abs_factor)}});
      text << std::setw(6) << d.degree << "  " << std::setw(7) << d.removed.size() << "  " << d.min_abs_factor << "\n";
    }
    diagnostics["degrees"] = std::move(degrees);
    if (a.write_operator) write_file(*a.write_operator, operator_to_json(res.R).dump(2) + "\n");
    if (a.write_change) write_file(*a.write_change, change_json(res.change).dump(2) + "\n");
    if (res.obstruction) {
      result["obstruction"] = obstruction_json(*res.obstruction);
      return obstructed(*res.obstruction);
    }
    text << "p = " << format_series(res.p) << "\nq = " << format_series(res.q) << "\n";
    if (a.triangular) {
      const auto tri = to_triangular_form(R, alpha);
      result["triangular"] = Json{{"h", format_series(tri.h)}, {"change", change_json(tri.change)}};
      text << "h = " << format_series(tri.h) << "\n";
      if (const auto ob = linearize(tri.h, N)) return obstructed(*ob);
    }
    return env.ok(std::move(result), std::move(diagnostics), text.str());
  });
  });
}

Report cmd_brjuno(const Options& o, const BrjunoArgs& a) {
  Envelope env(o, "brjuno", mode_name(o));
  env.arg("alpha", a.alpha);
  const auto policy = brjuno_policy(o, a.depth, a.threshold);
  env.arg("depth", policy.depth);
  env.arg("divergence_threshold", policy.divergence_threshold);
  return guarded(env, [&] {
  const Alpha alpha = parse_alpha(a.alpha, float_bits(o));
  const std::size_t shown = std::max<std::size_t>(policy.depth, o.config.at("brjuno").at("display_depth").get<std::size_t>());
  Json result{{"alpha", alpha_to_json(alpha)}, {"sigma", sigma_to_json(sigma_membership(alpha))}};
  std::ostringstream text;
  text << "alpha = " << alpha.describe() << "\n";
  std::optional<ContinuedFraction> cf;
  if (alpha.is_cf()) cf = std::get<ContinuedFraction>(alpha.value);
  if (alpha.is_rational()) cf = cf_expand(std::get<Rational>(alpha.value), shown);
  if (alpha.is_float()) cf = cf_expand(std::get<BigFloat>(alpha.value), shown);
  result["continued_fraction"] = cf_to_json(*cf, std::min<std::size_t>(shown, cf->available_depth(shown)));
  if (alpha.is_rational()) {
    result["certificate"] = nullptr;
    text << "rational: finite expansion " << cf->notation() << "\n";
  } else {
    const auto cert = brjuno_decide(*cf, policy);
    result["certificate"] = certificate_to_json(cert);
    text << "decision: " << to_string(cert.decision) << " (" << cert.reason << ")\n";
  }
  const auto flags = sigma_membership(alpha);
  text << "Σ_sm: " << to_string(flags.in_sigma_sm) << ", Σ_an: " << to_string(flags.in_sigma_an) << "\n";
  return env.ok(std::move(result), Json::object(), text.str());
  });
}

Report cmd_monodromy(const Options& o, const MonodromyArgs& a) {
  Envelope env(o, "monodromy", "double");
  const Json& c = o.config.at("monodromy");
  LoopSpec loop;
  loop.radius = a.radius.value_or(c.at("radius").get<double>());
  loop.segments = a.segments.value_or(c.at("segments").get<int>());
  loop.tol = a.tol.value_or(c.at("tol").get<double>());
  loop.winding = a.winding.value_or(c.at("winding").get<int>());
  loop.domain_radius = c.at("domain_radius").get<double>();
  const int samples = a.samples.value_or(c.at("samples").get<int>());
  const double top = c.at("sample_top").get<double>(), ratio = c.at("sample_ratio").get<double>();
  env.arg("alpha", a.alpha);
  env.arg("radius", loop.radius);
  env.arg("segments", loop.segments);
  env.arg("tol", loop.tol);
  env.arg("winding", loop.winding);
  env.arg("samples", samples);

  return guarded(env, [&] {
  std::string h_text = a.h;
  if (std::filesystem::is_regular_file(a.h)) {
    h_text = read_file(a.h);
    env.file(a.h, h_text);
  } else {
    env.arg("h", a.h);
  }
  const VarList uv = {"u", "v"};
  const auto h_series = parse_series<Rational>(h_text, uv, 64);
  if (h_series.truncated_to(1) != Series<Rational>::variable(uv, 64, 0)) {
    return env.fail("DomainError", "h must be u + (terms of degree ≥ 2), got " + format_series(h_series));
  }
  const double alpha = parse_alpha(a.alpha, 128).to_double();
  if (samples < 3) return env.fail("DomainError", "at least three samples are needed");
  std::vector<Complex> z0s;
  for (int i = 0; i < samples; ++i) z0s.push_back(top * std::pow(ratio, i) * std::exp(Complex(0.0, 0.3 + i)));

  const auto out = monodromy_map(ComplexPolynomial(h_series), Complex(alpha, 0.0), loop, z0s);
  Json table = Json::array();
  std::size_t flagged = 0;
  for (const auto& s : out) {
    Json row{{"z0", complex_json(s.z0)}, {"z1", complex_json(s.z1)}, {"error", s.error}, {"flagged", s.flagged}};
    if (s.failure) row["failure"] = *s.failure;
    flagged += s.flagged ? 1 : 0;
    table.push_back(std::move(row));
  }
  if (a.plot_data) {
    std::ostringstream plot;
    plot << "# |z0| arg(z1/z0) |z1/z0|\n" << std::setprecision(17);
    for (const auto& s : out) {
      if (s.failure) continue;
      plot << std::abs(s.z0) << " " << std::arg(s.z1 / s.z0) << " " << std::abs(s.z1 / s.z0) << "\n";
    }
    write_file(*a.plot_data, plot.str());
  }
  Json diagnostics{{"samples", table}, {"flagged", flagged}};
  const Complex expected = linear_multiplier(alpha, loop.winding);
  Json result{{"alpha", alpha}, {"h", format_series(h_series)}, {"expected", complex_json(expected)}};
  MultiplierFit fit;
  try {
    fit = germ_multiplier(out);
  } catch (const DomainError& e) {
    return env.fail("DomainError", e.what(), std::move(result), std::move(diagnostics));
  }
  const double rel = std::abs(fit.multiplier - expected) / std::abs(expected);
  result["multiplier"] = complex_json(fit.multiplier);
  result["relative_error"] = rel;
  result["residual"] = fit.residual;
  result["used"] = fit.used;
  std::ostringstream text;
  text << std::setprecision(12) << "multiplier " << fit.multiplier.real() << " + " << fit.multiplier.imag()
       << "i, expected e^(2πiα·" << loop.winding << ") = " << expected.real() << " + " << expected.imag()
       << "i, relative error " << rel << ", fit residual " << fit.residual << "\n";
  return env.ok(std::move(result), std::move(diagnostics), text.str());
  });
}

namespace {

/// Property drivers shared by the `selftest` subcommand.
struct Driver {
  std::mt19937_64 rng;

  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
  Rational rational(long lo = -3, long hi = 3, long den = 3) {
    return Rational(mpz_class(uniform(lo, hi)), mpz_class(uniform(1, den)));
  }
  Series<Rational> series(const VarList& vars, int n, int lo, int hi) {
    Series<Rational> s(vars, n);
    for (int d = lo; d <= hi; ++d)
      for (int i = 0; i <= d; ++i)
        if (uniform(0, 1) == 1) s.add_term(Monomial{i, d - i}, rational());
    return s;
  }
};

Json property(const std::string& name, int cases, int failures, const std::string& first) {
  Json j{{"name", name}, {"cases", cases}, {"failures", failures}};
  if (!first.empty()) j["first_failure"] = first;
  return j;
}

}  // namespace

Report cmd_selftest(const Options& o, std::optional<int> trials_opt) {
  Envelope env(o, "selftest", "rational");
  const std::uint64_t seed = o.seed.value_or(o.config.at("selftest").at("seed").get<std::uint64_t>());
  const int trials = trials_opt.value_or(o.config.at("selftest").at("trials").get<int>());
  env.arg("seed", seed);
  env.arg("trials", trials);
  Driver d{std::mt19937_64(seed)};
  const VarList xy = default_vars(2);
  Json props = Json::array();
  int total_failures = 0;
  using S = Series<Rational>;
  using Op = OperatorField<Rational>;

  {  // Left symmetry ⇔ vanishing torsion of the linear operator.
    int fail = 0;
    std::string first;
    for (int t = 0; t < trials; ++t) {
      Lsa<Rational> A(2);
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j) A.set(k, i, j, Rational(d.uniform(-2, 2)));
      const bool ls = check_left_symmetric(A).left_symmetric;
      const bool nij = is_nijenhuis(operator_of_lsa(A, xy, 2), 1).nijenhuis;
      if (ls != nij) {
        ++fail;
        if (first.empty()) first = lsa_to_json(A).dump();
      }
    }
    total_failures += fail;
    props.push_back(property("left_symmetric_iff_nijenhuis", trials, fail, first));
  }
  {  // Bracket symmetry and [[R, R]] = 2 N_R.
    int fail = 0;
    std::string first;
    for (int t = 0; t < trials; ++t) {
      auto rop = [&] {
        return Op({{d.series(xy, 4, 0, 2), d.series(xy, 4, 0, 2)}, {d.series(xy, 4, 0, 2), d.series(xy, 4, 0, 2)}});
      };
      const Op R = rop(), Q = rop();
      const bool sym = fn_bracket(R, Q) == fn_bracket(Q, R);
      const bool twice = fn_bracket(R, R) == nijenhuis_torsion(R).scaled(Rational(2));
      if (!sym || !twice) {
        ++fail;
        if (first.empty()) first = operator_to_json(R).dump() + " / " + operator_to_json(Q).dump();
      }
    }
    total_failures += fail;
    props.push_back(property("fn_bracket_symmetric_and_twice_torsion", trials, fail, first));
  }
  {  // Base residual equals the degree-k part of [[R_k, R_1]].
    int fail = 0;
    std::string first;
    for (int t = 0; t < trials; ++t) {
      const int k = static_cast<int>(d.uniform(2, 5));
      Rational alpha = d.rational();
      if (alpha.is_zero()) alpha = Rational(1);
      const S a = d.series(xy, k + 1, k, k), b = d.series(xy, k + 1, k, k), c = d.series(xy, k + 1, k, k),
              e = d.series(xy, k + 1, k, k);
      const S x = S::variable(xy, k + 1, 0), y = S::variable(xy, k + 1, 1), z(xy, k + 1);
      const auto T = fn_bracket(Op({{a, b}, {c, e}}), Op({{z, x}, {z, y.scaled(alpha)}})).homogeneous_part(k);
      const auto [r1, r2] = base_equations_residual(DegreeSlice<Rational>{k, a, b, c, e}, alpha);
      if (T(0, 0, 1) != r1 || T(1, 0, 1) != r2) {
        ++fail;
        if (first.empty()) first = "k = " + std::to_string(k) + ", α = " + alpha.str();
      }
    }
    total_failures += fail;
    props.push_back(property("base_residual_matches_bracket", trials, fail, first));
  }
  {  // Normal-form round trip.
    int fail = 0;
    std::string first;
    const int cases = std::min(trials, 10);
    const Rational alphas[] = {Rational(mpz_class(1), mpz_class(2)), Rational(mpz_class(1), mpz_class(3)),
                               Rational(mpz_class(2), mpz_class(5)), Rational(mpz_class(3), mpz_class(2))};
    for (int t = 0; t < cases; ++t) {
      const int n = 6;
      const Rational alpha = alphas[t % 4];
      const S x = S::variable(xy, n, 0), y = S::variable(xy, n, 1);
      S q = y.scaled(alpha);
      for (int j = 2; j <= n; ++j) q.add_term(Monomial{0, j}, d.rational());
      const S l = S::constant(xy, n, d.rational());
      const Op R0({{l, x + d.series(xy, n, 2, n)}, {S(xy, n), l + q}});
      const auto phi = FormalChange<Rational>::from_forward({x + d.series(xy, n, 2, 3), y + d.series(xy, n, 2, 3)});
      const auto res = normal_form(transform_operator(R0, phi), alpha, n);
      const bool good = !res.obstruction && res.q.derivative(0).is_zero() &&
                        (res.R - Op::scalar(xy, n, res.lambda0))(1, 0).is_zero() &&
                        (res.R - Op::scalar(xy, n, res.lambda0))(0, 0).is_zero();
      if (!good) {
        ++fail;
        if (first.empty()) first = "case " + std::to_string(t);
      }
    }
    total_failures += fail;
    props.push_back(property("normal_form_round_trip", cases, fail, first));
  }

  std::ostringstream text;
  for (const auto& p : props) {
    text << (p["failures"].get<int>() == 0 ? "pass " : "FAIL ") << p["name"].get<std::string>() << " ("
         << p["cases"].get<int>() << " cases)\n";
  }
  Json result{{"seed", seed}, {"properties", props}};
  if (total_failures > 0) {
    return env.finish("error", std::move(result), Json::object(), text.str(),
                      Json{{"kind", "PropertyFailure"}, {"message", std::to_string(total_failures) + " failing cases"}},
                      1);
  }
  return env.ok(std::move(result), Json::object(), text.str());
}

}  // namespace nijlin::cli
