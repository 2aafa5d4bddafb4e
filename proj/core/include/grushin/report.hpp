#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace grushin {

enum class Verdict { pass, fail, diagnostic };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CheckRecord {
  std::string name;
  std::string anchor;
  nlohmann::json values = nlohmann::json::object();
  double tolerance = 0;
  Verdict verdict = Verdict::diagnostic;
  std::string note;
};

// Plot-ready numeric table; rendered as CSV with a header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> r);
  std::string to_csv() const;
};

// Regression quantity compared against the baseline store with a relative tolerance.
struct RegressionValue {
  double value = 0;
  double tolerance = 0.1;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  std::map<std::string, Table> tables;
  std::map<std::string, RegressionValue> regression;

  CheckRecord& add(CheckRecord r);
  void merge(const VerificationReport& other);
  bool passed() const;
  std::size_t count(Verdict v) const;
  const CheckRecord* find(const std::string& name) const;

  nlohmann::json records_json() const;
};

inline constexpr int kReportSchemaVersion = 1;

// Every record anchor must be one of these.
const std::vector<std::string>& registered_anchors();
bool anchor_registered(const std::string& anchor);

namespace anchors {
inline constexpr const char* gauge = "geometry.gauge-and-angle";
inline constexpr const char* dilation = "geometry.dilation-homogeneity";
inline constexpr const char* generator = "geometry.generator-eigenfunctions";
inline constexpr const char* first_derivatives = "calculus.gauge-first-derivatives";
inline constexpr const char* second_derivatives = "calculus.gauge-second-derivatives";
inline constexpr const char* third_derivatives = "calculus.gauge-third-derivatives";
inline constexpr const char* psi_derivatives = "calculus.angle-derivatives";
inline constexpr const char* second_derivative_bounds = "calculus.second-derivative-bounds";
inline constexpr const char* commutator_z = "calculus.commutator-with-generator";
inline constexpr const char* gradient_generator = "calculus.gradient-generator-identity";
inline constexpr const char* gradient_norm = "calculus.gradient-norm-equals-angle";
inline constexpr const char* f_on_gauge = "coefficients.radial-field-on-gauge";
inline constexpr const char* f_equals_z = "coefficients.radial-field-constant-case";
inline constexpr const char* mu_bounds = "coefficients.mu-ellipticity";
inline constexpr const char* hypothesis = "coefficients.structural-hypothesis";
inline constexpr const char* bound_suite = "coefficients.structural-consequences";
inline constexpr const char* third_bound = "coefficients.third-derivative-bound";
inline constexpr const char* radial_identity = "operators.radial-identity";
inline constexpr const char* fundamental_solution = "operators.fundamental-solution";
inline constexpr const char* rellich = "operators.rellich-identity";
inline constexpr const char* quadrature_volume = "quadrature.ball-volume";
inline constexpr const char* quadrature_scaling = "quadrature.dilation-scaling";
inline constexpr const char* carleman_est1 = "carleman.power-exponential-weight";
inline constexpr const char* carleman_df = "carleman.c1-potential";
inline constexpr const char* carleman_f10 = "carleman.sublinear";
inline constexpr const char* carleman_har1 = "carleman.log-squared-weight";
inline constexpr const char* carleman_potential = "carleman.potential-assumptions";
inline constexpr const char* carleman_substitution = "carleman.substitution-expansion";
inline constexpr const char* ucp_exact = "ucp.exact-solutions";
inline constexpr const char* ucp_consistency = "ucp.discrete-consistency";
inline constexpr const char* ucp_vanishing = "ucp.vanishing-order";
inline constexpr const char* ucp_sublinear = "ucp.sublinear-solve";
inline constexpr const char* ucp_hardy = "ucp.hardy-potential";
inline constexpr const char* ucp_potential = "ucp.bounded-potential-refinement";
inline constexpr const char* baseline = "reporting.baseline-drift";
inline constexpr const char* suite_error = "reporting.suite-error";
}  // namespace anchors

}  // namespace grushin
