#pragma once

#include <functional>

#include "grushin/calculus.hpp"

namespace grushin {

// Value, X-gradient and noncommuting X-Hessian (row = outer field) of a function at a point.
struct Jet2 {
  double value = 0;
  Vec grad;
  Mat hess;

  static Jet2 constant(int N, double c);
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator*(double c, const Jet2& a);
Jet2 operator+(double c, const Jet2& a);

// f∘a from f(a), f'(a), f''(a).
Jet2 compose(const Jet2& a, double f, double df, double d2f);
Jet2 pow(const Jet2& a, double e);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);

Jet2 rho_jet(const GaugeJets& j);
Jet2 coordinate_jet(const GrushinSpace& s, const Point& p, int l);
Jet2 znorm_jet(const GrushinSpace& s, const Point& p);

using JetFunction = std::function<Jet2(const Point&)>;

// Wraps a jet-valued function as a ScalarField with analytic gradient and Hessian.
ScalarField field_from_jets(JetFunction f);

}  // namespace grushin
