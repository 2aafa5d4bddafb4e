#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grushin/baseline.hpp"
#include "grushin/config.hpp"

namespace grushin {

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> baseline_path;  // overrides output.baseline
  // Subcommand filter: only declared suites of these kinds run; if none is declared, all of them run.
  std::vector<SuiteKind> only;
  bool update_baseline = false;
  bool quiet = false;
};

struct RunResult {
  int exit_code = 0;
  VerificationReport report;
  nlohmann::json document;  // what report.json holds
  std::string report_path;
};

// Suites in run order after applying the filter.
std::vector<SuiteSelection> selected_suites(const ExperimentConfig& cfg, const std::vector<SuiteKind>& only);

// One suite against the archived store (read only; carleman constants come from it).
VerificationReport run_suite(const ExperimentConfig& cfg, const SuiteSelection& sel, const BaselineStore& store);

// JSON report: schema version, environment stamp, config echo, summary, records, regression values.
nlohmann::json report_document(const ExperimentConfig& cfg, const VerificationReport& rep,
                               const std::vector<SuiteSelection>& suites, double wall_seconds,
                               const std::vector<double>& suite_seconds = {});

// report.json, one CSV per table and plots.gp into dir.
void write_outputs(const std::string& dir, const nlohmann::json& document, const VerificationReport& rep);
std::string gnuplot_script(const VerificationReport& rep);

// Exit status: 2 on a config error (nothing written), 1 on a runtime failure (partial report
// written) or when the fail verdicts disagree with the declared expectation, 0 otherwise.
RunResult run(const RunOptions& opt);
int run_config(const std::string& path);

}  // namespace grushin
