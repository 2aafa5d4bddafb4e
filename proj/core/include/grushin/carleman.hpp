#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grushin/operators.hpp"
#include "grushin/potentials.hpp"
#include "grushin/test_functions.hpp"

namespace grushin {

// est1: ρ^{-2α}e^{2αρ^ε} weights; df: same with (𝓛u + Vu)² and |V| + |FV| ≤ Kψ;
// f10: same with (𝓛u + f(u)ψ)² and an extra α³ρ^{-2α-2}|u|^q μ term; har1: e^{β(log ρ)²} weights.
enum class CarlemanKind { est1, df, f10, har1 };

const char* to_string(CarlemanKind k);
CarlemanKind carleman_kind_from_string(const std::string& s);
const char* carleman_anchor(CarlemanKind k);

struct CarlemanCase {
  CarlemanKind which = CarlemanKind::est1;
  double epsilon = 0.5;
  double parameter = 40;  // α, or β for har1
  double R = 0.5;
  PotentialSpec potential;  // c1 potential for df, sublinearity for f10

  // β = (2α + 4 − Q)/2 of the substitution v = ρ^{-β}e^{αρ^ε}u.
  double substitution_beta(double Q) const { return (2 * parameter + 4 - Q) / 2; }
};

struct CarlemanSides {
  CarlemanKind which = CarlemanKind::est1;
  double parameter = 0;
  std::string function;
  // Integrals divided by e^{log_scale}, the right-hand weight at the inner support radius.
  double lhs_zero = 0, lhs_grad = 0, lhs_q = 0, rhs = 0;
  double err_zero = 0, err_grad = 0, err_q = 0, err_rhs = 0;
  double log_scale = 0;
  double ratio = 0;
  double ratio_error = 0;
  // Right-hand side rebuilt from v = ρ^{-β}e^{αρ^ε}u through the expanded product rule.
  double rhs_substituted = 0;
  double substitution_gap = 0;  // |rhs − rhs_substituted| / rhs
  bool degenerate = false;      // u ≡ 0

  double lhs() const { return lhs_zero + lhs_grad + lhs_q; }
};

struct CarlemanSettings {
  PolarGrid grid;
  double epsilon = 0.5;
  double R = 0.5;
  PotentialSpec df_potential = PotentialSpec::modulated(PotentialSpec::Kind::c1, 10.0);
  PotentialSpec sublinearity = PotentialSpec::sublinear(1.5, 1.0);
  bool substitution_check = true;
  int threads = 1;
};

// All (kind, parameter) combinations for one function on a shared node set.
std::vector<CarlemanSides> evaluate_function(const DegenerateOperator& op, const TestFunction& u,
                                             const std::vector<CarlemanKind>& kinds,
                                             const std::vector<double>& parameters, const CarlemanSettings& st);

CarlemanSides evaluate_sides(const CarlemanCase& c, const DegenerateOperator& op, const TestFunction& u,
                             const PolarGrid& grid = {});

struct SweepSummary {
  std::vector<double> parameters;
  std::vector<double> ratios;
  double max_growth = 0;  // largest ratio(2p)/ratio(p) − 1 over consecutive doublings
  double slope = 0;       // least-squares slope of log(RHS/LHS) against log p
  bool degenerate = false;
  bool bounded = true;    // max_growth ≤ 0.10
};

SweepSummary summarize_sweep(const std::vector<CarlemanSides>& one_function_one_kind);

// max LHS/RHS over the suite plus a 20% margin.
double constant_estimate(const std::vector<CarlemanSides>& evaluations);

struct CarlemanSuiteOptions {
  std::vector<CarlemanKind> kinds{CarlemanKind::est1, CarlemanKind::df, CarlemanKind::f10, CarlemanKind::har1};
  std::vector<double> parameters{20, 40, 80, 160};
  CarlemanSettings settings;
  double growth_tolerance = 0.10;
  double substitution_tolerance = 0.01;
  // Archived constants per kind; when present every ratio must stay below and the rerun
  // estimate must reproduce within reproduce_tolerance.
  std::map<std::string, double> archived;
  double reproduce_tolerance = 0.10;
};

struct CarlemanSuiteResult {
  std::vector<CarlemanSides> evaluations;
  std::map<std::string, double> constants;  // per kind
  VerificationReport report;
};

CarlemanSuiteResult carleman_suite(const DegenerateOperator& op, const std::vector<TestFunction>& suite,
                                   const CarlemanSuiteOptions& opt);

}  // namespace grushin
