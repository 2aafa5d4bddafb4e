#pragma once

#include <string>
#include <vector>

#include "grushin/coefficients.hpp"
#include "grushin/jet.hpp"

namespace grushin {

struct BoundItem {
  std::string name;
  std::string anchor;
  // Hard pointwise ceiling when the constant is explicit (gradient-of-gauge bounds); 0 otherwise.
  double ceiling = 0;
};

const std::vector<BoundItem>& bound_items();

// LHS/majorant for every item at one point, in bound_items() order.
std::vector<double> bound_ratios(const CoefficientField& A, const Point& p,
                                 const std::vector<JetFunction>& tests);

// Five fixed smooth functions with analytic jets used by the commutator items.
std::vector<JetFunction> commutator_test_functions(const GrushinSpace& s);

struct BoundSuiteOptions {
  SampleSpec samples;  // samples.count is the doubled cloud; the half cloud is its prefix
  double growth_tolerance = 0.10;
  int threads = 1;
  std::size_t fd_crosscheck_points = 100;
};

VerificationReport structural_bound_suite(const CoefficientField& A, const BoundSuiteOptions& opt);

}  // namespace grushin
