#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "nijlin/series/io.hpp"

namespace nijlin::cli {

inline constexpr const char* kReportSchema = "nijlin.report/1";

/// Built-in defaults (config/defaults.json, embedded at build time), with
/// the keys of an override file merged on top.
Json load_config(const std::optional<std::string>& override_path = std::nullopt);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

struct Options {
  /// `rational` or `float[:bits]`.
  std::string mode = "rational";
  std::optional<int> degree;
  /// `text` or `structured`.
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  /// Adds wall-clock timing to the report (off so that reports are
  /// reproducible byte for byte).
  bool timing = false;
  std::optional<std::string> output;
  Json config;
};

struct Report {
  Json json;
  std::string text;
  int exit_code = 0;
};

struct ClassifyArgs {
  std::optional<std::string> input;
  std::optional<std::string> label;
  std::optional<std::string> basepoint;
  std::optional<double> tolerance;
};

struct NormalizeArgs {
  std::optional<std::string> input;
  std::string alpha;
  std::optional<std::string> h;
  std::optional<long> divisor_floor_log2;
  bool triangular = false;
  bool divisor_log = false;
  std::optional<std::string> write_operator;
  std::optional<std::string> write_change;
};

struct BrjunoArgs {
  std::string alpha;
  std::optional<std::size_t> depth;
  std::optional<double> threshold;
};

struct MonodromyArgs {
  std::string alpha;
  std::string h = "u";
  std::optional<double> radius;
  std::optional<int> samples;
  std::optional<double> tol;
  std::optional<int> winding;
  std::optional<int> segments;
  std::optional<std::string> plot_data;
};

Report cmd_torsion(const Options& o, const std::string& input);
Report cmd_bracket(const Options& o, const std::string& first, const std::string& second);
Report cmd_classify(const Options& o, const ClassifyArgs& a);
Report cmd_normalize(const Options& o, const NormalizeArgs& a);
Report cmd_brjuno(const Options& o, const BrjunoArgs& a);
Report cmd_monodromy(const Options& o, const MonodromyArgs& a);
Report cmd_selftest(const Options& o, std::optional<int> trials);

/// Parses the command line, runs one subcommand and prints its report.
/// Returns the process exit code: 0 on success, 1 on an error outcome,
/// 3 on a normal-form obstruction, CLI11's code on a usage error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nijlin::cli
