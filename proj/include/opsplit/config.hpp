#pragma once

#include "opsplit/engine.hpp"
#include "opsplit/equilibrium.hpp"
#include "opsplit/inclusion.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

// Config-driven front end shared by the CLI and the Python bindings. A run
// configuration is a JSON document (nested key-value sections, numbers in
// decimal, matrices row-major); the exact grammar is documented in the
// project README.

namespace opsplit {

enum class ExitCode : int {
  ok = 0,
  config_error = 1,
  max_iter = 2,
  domain_stop = 3,
  verify_failed = 4,
};

/// Thrown on malformed or out-of-range configuration input; the message is
/// anchored to the offending location (line for syntax, key path for
/// semantics).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  std::string kind;  // "inclusion" | "equilibrium" | "generic"
  Eigen::Index dim = 0;
  std::uint64_t seed = 0;
  StopRule stop;
  std::string output;  // trace file path
  Vector x0;
  std::optional<Vector> reference;

  // kind == "inclusion"
  std::optional<InclusionProblem> inclusion;
  GammaSchedule gamma;
  InclusionErrors inclusion_errors;

  // kind == "equilibrium"
  std::optional<EquilibriumProblem> equilibrium;
  EquilibriumSchedules equilibrium_schedules;

  // kind == "generic"
  std::optional<ProblemSpec> generic;
  ErrorSchedule generic_errors;
  RelaxationSchedule lambda;
};

/// Parses and validates a config document. Throws ConfigError.
LoadedConfig parse_config_text(const std::string& text,
                               const std::string& origin);

/// Reads, parses, and validates a config file. Throws ConfigError.
LoadedConfig load_config(const std::string& path);

struct RunSummary {
  RunStatus status = RunStatus::max_iter;
  int iterations = 0;
  double final_residual = 0.0;
  double final_outer_gap = 0.0;
  double final_feasibility = 0.0;
  Vector solution;
  std::string stop_reason;
  std::string trace_path;
  int trace_rows = 0;
};

/// Executes the configured solve and writes the trace file (header row plus
/// columns n, residual, outer_gap, error_bound, dist_to_ref,
/// feasibility_max). output_override, when set, replaces the config's
/// output path.
RunSummary run_from_config(const LoadedConfig& config,
                           const std::string& output_override = "");

/// Runs every certificate suite that applies to the configured problem with
/// the config's seed. Returns the collected reports.
VerificationReport verify_from_config(const LoadedConfig& config);

/// Index-control audit results are reported separately from the sampling
/// certificates since they are exhaustive rather than sampled.
std::optional<IndexControlReport> audit_index_control_from_config(
    const LoadedConfig& config);

/// Column documentation for `trace-format`.
std::string trace_format_text();

}  // namespace opsplit
