#pragma once

#include <map>
#include <string>

#include "grushin/report.hpp"

namespace grushin {

inline constexpr int kBaselineSchemaVersion = 1;

// Versioned file of archived regression quantities: {"schema_version": 1, "entries": {key: {value, tolerance}}}.
struct BaselineStore {
  std::map<std::string, RegressionValue> entries;

  // A missing file is an empty store; a malformed one throws BaselineError.
  static BaselineStore load(const std::string& path);
  static BaselineStore from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  const RegressionValue* find(const std::string& key) const;
};

// Compares every regression quantity of the report with the store. New keys are written
// (diagnostic records); known keys pass iff the relative drift is within the stored tolerance.
// With update = true, known keys are overwritten by the measured values and the drift is only reported.
VerificationReport emit_baselines(const VerificationReport& report, BaselineStore& store, bool update = false);

}  // namespace grushin
