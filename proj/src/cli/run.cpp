#include <CLI11.hpp>
#include <fstream>
#include <ostream>

#include "nijlin/cli/cli.hpp"
#include "nijlin/error.hpp"

namespace nijlin::cli {

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nijlin: Nijenhuis operators, left-symmetric algebras, formal normal forms and small divisors"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  std::optional<std::string> config_path;
  app.add_option("--mode", o.mode, "Coefficient mode: rational or float[:bits]")->capture_default_str();
  app.add_option("--degree", o.degree, "Truncation order N");
  app.add_option("--format", o.format, "Output: text or structured")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for randomized drivers");
  app.add_option("--config", config_path, "JSON file overriding the built-in defaults");
  app.add_option("--output", o.output, "Also write the structured report to this file");
  app.add_flag("--timing", o.timing, "Record wall-clock time in the report");

  std::string input, second;
  auto* torsion = app.add_subcommand("torsion", "Nijenhuis torsion of an operator field");
  torsion->add_option("input", input, "Operator JSON file or template:<label>")->required();

  auto* bracket = app.add_subcommand("bracket", "Frölicher–Nijenhuis bracket of two operator fields");
  bracket->add_option("first", input, "Operator JSON file or template:<label>")->required();
  bracket->add_option("second", second, "Operator JSON file or template:<label>")->required();

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Identify the linear part and look up degeneracy verdicts");
  classify->add_option("input", ca.input, "Operator JSON file or template:<label>");
  classify->add_option("--label", ca.label, "Skip identification and use this label (e.g. b1:-exp-floor)");
  classify->add_option("--basepoint", ca.basepoint, "Comma-separated point at which to extract the algebra");
  classify->add_option("--tolerance", ca.tolerance, "Relative zero tolerance in float mode");

  NormalizeArgs na;
  auto* normalize = app.add_subcommand("normalize", "Degree-by-degree normal form and triangular linearization");
  normalize->add_option("input", na.input, "Operator JSON file or template:<label>");
  normalize->add_option("--alpha", na.alpha, "α: rational, decimal or continued-fraction spec")->required();
  normalize->add_option("--h", na.h, "Linearize [[0, h], [0, αy]] directly instead of normalizing an operator");
  normalize->add_option("--divisor-floor", na.divisor_floor_log2, "log2 of the small-divisor floor (float mode)");
  normalize->add_flag("--triangular", na.triangular, "Also build the triangular form and linearize it");
  normalize->add_flag("--divisor-log", na.divisor_log, "Include every logged divisor in the report");
  normalize->add_option("--write-operator", na.write_operator, "Write the normal-form operator file");
  normalize->add_option("--write-change", na.write_change, "Write the change tower file");

  BrjunoArgs ba;
  auto* brjuno = app.add_subcommand("brjuno", "Continued fraction, Brjuno certificate and Σ membership of α");
  brjuno->add_option("alpha", ba.alpha, "α: rational, decimal or continued-fraction spec")->required();
  brjuno->add_option("--depth", ba.depth, "Partial sums to examine");
  brjuno->add_option("--threshold", ba.threshold, "Divergence threshold for the partial sums");

  MonodromyArgs ma;
  auto* monodromy = app.add_subcommand("monodromy", "Monodromy multiplier of u' = h(u, v), v' = αv");
  monodromy->add_option("--alpha", ma.alpha, "α")->required();
  monodromy->add_option("--h", ma.h, "h(u, v) inline or a file holding it")->capture_default_str();
  monodromy->add_option("--radius", ma.radius, "Loop radius ε");
  monodromy->add_option("--samples", ma.samples, "Number of transversal starting values");
  monodromy->add_option("--tol", ma.tol, "Integrator tolerance");
  monodromy->add_option("--winding", ma.winding, "Turns around the separatrix");
  monodromy->add_option("--segments", ma.segments, "Loop segments");
  monodromy->add_option("--plot-data", ma.plot_data, "Write |z0|, arg(z1/z0), |z1/z0| columns here");

  std::optional<int> trials;
  auto* selftest = app.add_subcommand("selftest", "Randomized property drivers");
  selftest->add_option("--trials", trials, "Cases per property");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Report report;
  try {
    o.config = load_config(config_path);
    if (*torsion) report = cmd_torsion(o, input);
    if (*bracket) report = cmd_bracket(o, input, second);
    if (*classify) report = cmd_classify(o, ca);
    if (*normalize) report = cmd_normalize(o, na);
    if (*brjuno) report = cmd_brjuno(o, ba);
    if (*monodromy) report = cmd_monodromy(o, ma);
    if (*selftest) report = cmd_selftest(o, trials);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string structured = report.json.dump(2) + "\n";
  if (o.output) {
    std::ofstream f(*o.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << *o.output << "'\n";
      return 1;
    }
    f << structured;
  }
  if (o.format == "structured") {
    out << structured;
  } else if (report.exit_code == 0) {
    out << report.text;
  } else {
    err << report.text;
  }
  return report.exit_code;
}

}  // namespace nijlin::cli
