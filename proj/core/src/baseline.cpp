#include "grushin/baseline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "grushin/types.hpp"

namespace grushin {

BaselineStore BaselineStore::from_json(const nlohmann::json& j) {
  BaselineStore s;
  try {
    if (!j.is_object() || j.at("schema_version").get<int>() != kBaselineSchemaVersion)
      throw BaselineError("baseline store has an unsupported schema version");
    for (const auto& [k, v] : j.at("entries").items()) {
      RegressionValue r;
      r.value = v.at("value").get<double>();
      r.tolerance = v.at("tolerance").get<double>();
      if (!std::isfinite(r.value) || !(r.tolerance >= 0)) throw BaselineError("baseline entry '" + k + "' is invalid");
      s.entries[k] = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw BaselineError(std::string("corrupt baseline store: ") + e.what());
  }
  return s;
}

BaselineStore BaselineStore::load(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BaselineError("corrupt baseline store " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json BaselineStore::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kBaselineSchemaVersion;
  j["entries"] = nlohmann::json::object();
  for (const auto& [k, v] : entries) j["entries"][k] = {{"value", v.value}, {"tolerance", v.tolerance}};
  return j;
}

void BaselineStore::save(const std::string& path) const {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  out << to_json().dump(2) << '\n';
  if (!out) throw BaselineError("cannot write baseline store " + path);
}

const RegressionValue* BaselineStore::find(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

VerificationReport emit_baselines(const VerificationReport& report, BaselineStore& store, bool update) {
  VerificationReport out;
  for (const auto& [key, v] : report.regression) {
    CheckRecord r;
    r.name = "baseline." + key;
    r.anchor = anchors::baseline;
    r.values = {{"measured", v.value}};
    const RegressionValue* old = store.find(key);
    if (!old) {
      store.entries[key] = v;
      r.verdict = Verdict::diagnostic;
      r.tolerance = v.tolerance;
      r.note = "written";
    } else {
      const double scale = std::max(std::abs(old->value), 1e-300);
      const double drift = std::abs(v.value - old->value) / scale;
      r.values["archived"] = old->value;
      r.values["drift"] = drift;
      r.tolerance = old->tolerance;
      r.verdict = drift <= old->tolerance ? Verdict::pass : Verdict::fail;
      if (update) {
        store.entries[key] = v;
        r.verdict = Verdict::diagnostic;
        r.note = "updated";
      }
    }
    out.add(std::move(r));
  }
  return out;
}

}  // namespace grushin
