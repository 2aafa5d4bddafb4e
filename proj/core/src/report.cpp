#include "grushin/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace grushin {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::diagnostic: return "diagnostic";
  }
  return "diagnostic";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "diagnostic") return Verdict::diagnostic;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

void Table::add_row(std::vector<double> r) {
  if (r.size() != columns.size()) throw std::invalid_argument("table row width mismatch");
  rows.push_back(std::move(r));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  char buf[64];
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", r[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

CheckRecord& VerificationReport::add(CheckRecord r) {
  records.push_back(std::move(r));
  return records.back();
}

void VerificationReport::merge(const VerificationReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  for (const auto& [k, t] : other.tables) tables[k] = t;
  for (const auto& [k, v] : other.regression) regression[k] = v;
}

bool VerificationReport::passed() const { return count(Verdict::fail) == 0; }

std::size_t VerificationReport::count(Verdict v) const {
  return std::size_t(std::count_if(records.begin(), records.end(),
                                   [v](const CheckRecord& r) { return r.verdict == v; }));
}

const CheckRecord* VerificationReport::find(const std::string& name) const {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

nlohmann::json VerificationReport::records_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["name"] = r.name;
    j["anchor"] = r.anchor;
    j["values"] = r.values;
    j["tolerance"] = r.tolerance;
    j["verdict"] = to_string(r.verdict);
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

const std::vector<std::string>& registered_anchors() {
  using namespace anchors;
  static const std::vector<std::string> all = {
      gauge, dilation, generator, first_derivatives, second_derivatives, third_derivatives,
      psi_derivatives, second_derivative_bounds, commutator_z, gradient_generator, gradient_norm,
      f_on_gauge, f_equals_z, mu_bounds, hypothesis, bound_suite, third_bound, radial_identity,
      fundamental_solution, rellich, quadrature_volume, quadrature_scaling, carleman_est1,
      carleman_df, carleman_f10, carleman_har1, carleman_potential, carleman_substitution, ucp_exact,
      ucp_consistency, ucp_vanishing, ucp_sublinear, ucp_hardy, ucp_potential, baseline, suite_error};
  return all;
}

bool anchor_registered(const std::string& anchor) {
  const auto& a = registered_anchors();
  return std::find(a.begin(), a.end(), anchor) != a.end();
}

}  // namespace grushin
