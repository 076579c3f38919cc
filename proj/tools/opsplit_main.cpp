#include "opsplit/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

int run_command(const std::string& config_path,
                const std::string& output_override) {
  using namespace opsplit;
  LoadedConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
  RunSummary summary;
  try {
    summary = run_from_config(config, output_override);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }

  std::printf("status: %s\n", to_string(summary.status));
  std::printf("iterations: %d\n", summary.iterations);
  std::printf("final residual: %.12g\n", summary.final_residual);
  std::printf("final outer gap: %.12g\n", summary.final_outer_gap);
  std::printf("feasibility: %.12g\n", summary.final_feasibility);
  std::printf("trace: %s (%d rows)\n", summary.trace_path.c_str(),
              summary.trace_rows);
  if (!summary.stop_reason.empty()) {
    std::printf("stop reason: %s\n", summary.stop_reason.c_str());
  }

  switch (summary.status) {
    case opsplit::RunStatus::converged:
      return static_cast<int>(ExitCode::ok);
    case opsplit::RunStatus::max_iter:
      return static_cast<int>(ExitCode::max_iter);
    case opsplit::RunStatus::domain_stop:
      return static_cast<int>(ExitCode::domain_stop);
  }
  return static_cast<int>(ExitCode::config_error);
}

int verify_command(const std::string& config_path) {
  using namespace opsplit;
  LoadedConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }

  bool all_pass = true;
  try {
    const VerificationReport report = verify_from_config(config);
    for (const auto& check : report.checks) {
      std::printf("%-24s %-28s worst margin % .3e  %s\n", check.check.c_str(),
                  check.subject.c_str(), check.worst_margin,
                  check.pass ? "pass" : "FAIL");
      all_pass = all_pass && check.pass;
    }
    if (const auto audit = audit_index_control_from_config(config)) {
      if (audit->pass) {
        std::printf("%-24s %-28s %-24s pass\n", "index-control", "quasi-cyclic",
                    "");
      } else {
        std::printf("%-24s %-28s first violation n=%d i=%d  FAIL (%s)\n",
                    "index-control", "quasi-cyclic", audit->first_violation_n,
                    audit->violating_index, audit->reason.c_str());
        all_pass = false;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
  return static_cast<int>(all_pass ? ExitCode::ok : ExitCode::verify_failed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Splitting solvers for constrained fixed-point, monotone inclusion, "
      "and equilibrium problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;

  CLI::App* run = app.add_subcommand("run", "Execute a configured solve");
  run->add_option("config", config_path, "JSON run configuration")
      ->required();
  run->add_option("--output", output_override,
                  "Write the trace here instead of the config's output path");

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the operator/bifunction certificate suites");
  verify->add_option("config", config_path, "JSON run configuration")
      ->required();

  CLI::App* fmt = app.add_subcommand(
      "trace-format", "Print the trace file column documentation");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(config_path, output_override);
  if (verify->parsed()) return verify_command(config_path);
  if (fmt->parsed()) {
    std::printf("%s", opsplit::trace_format_text().c_str());
    return 0;
  }
  return 1;
}
