#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "grushin/bounds.hpp"
#include "grushin/carleman.hpp"
#include "grushin/suites.hpp"
#include "grushin/ucp.hpp"

namespace grushin {

inline constexpr int kConfigSchemaVersion = 1;

// The published schema is the default document: every accepted key appears in it, with the type of
// its default. Arrays of objects take their element schema from the first default element.
const nlohmann::json& config_schema();

enum class SuiteKind { identities, bounds, carleman, ucp };
const char* to_string(SuiteKind k);

struct SuiteSelection {
  SuiteKind kind = SuiteKind::identities;
  std::vector<CarlemanKind> kinds;  // carleman:{...}; empty means the carleman section's list
};

struct ExperimentConfig {
  nlohmann::json document;  // defaults merged with the file, echoed into the report
  std::string base_dir;     // relative output and baseline paths resolve against this

  GrushinSpace space{1, 1, 1.0};
  std::string family = "example";
  ExampleParams example;
  double violating_c = 1.0;
  double lambda = 0.5, Lambda = 1.0;
  bool expect_fail = false;

  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<SuiteSelection> suites;

  std::vector<GrushinSpace> ladder_spaces;
  LadderOptions ladder;
  IdentityOptions identities;
  RellichOptions rellich;
  ScalingOptions scaling;
  SampleSpec hypothesis_samples;
  BoundSuiteOptions bounds;
  CarlemanSuiteOptions carleman;
  UcpOptions ucp;

  std::string out_dir = "out";
  std::string baseline_path;  // empty: no baseline comparison

  CoefficientPtr coefficients(const GrushinSpace& s) const;
  // The selected seed, thread count and output directory replace the file's values.
  void override_seed(std::uint64_t seed);
  void override_threads(int threads);
};

// Merges j over the schema defaults and builds the typed config; throws ConfigError on unknown
// keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
// YAML, or JSON when the file ends in .json.
ExperimentConfig load_config(const std::string& path);
nlohmann::json read_config_document(const std::string& path);

}  // namespace grushin
