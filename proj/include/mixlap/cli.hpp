#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixlap {

enum class RunMode { solve, oracle, diagnose, sweep, certify };
enum class OutputFormat { json, csv };

std::string to_string(RunMode m);
std::string to_string(OutputFormat f);

/// Fully resolved batch configuration. p/q/s hold one value each except in
/// sweep mode, where comma-separated lists declare the lattice.
struct RunConfig {
  RunMode mode = RunMode::solve;
  std::vector<double> p{2.0};
  std::vector<double> q{2.0};
  std::vector<double> s{0.5};
  double a = 0.0;
  double b = 1.0;
  int nodes = 100;
  double tol = 1e-8;
  int max_outer = 400;
  std::uint64_t seed = 42;
  bool local_only = false;
  bool nonlocal_only = false;
  std::string output_path;  // empty = stdout
  OutputFormat format = OutputFormat::json;
};

/// Parses command-line arguments (argv[0] excluded) plus an optional
/// `--config <file>` of key=value lines; flags override file values.
/// Throws std::invalid_argument on usage errors.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the configured pipeline and writes the artifact. Returns the
/// process exit status; on module errors a structured error JSON is emitted
/// and the status is nonzero.
int run(const RunConfig& config);

}  // namespace mixlap
