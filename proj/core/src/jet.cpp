#include "grushin/jet.hpp"

#include <cmath>

namespace grushin {

Jet2 Jet2::constant(int N, double c) {
  Jet2 j;
  j.value = c;
  j.grad = Vec::Zero(N);
  j.hess = Mat::Zero(N, N);
  return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.value + b.value, a.grad + b.grad, a.hess + b.hess};
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.value - b.value, a.grad - b.grad, a.hess - b.hess};
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  r.grad = a.grad * b.value + b.grad * a.value;
  r.hess = a.hess * b.value + b.hess * a.value + a.grad * b.grad.transpose() +
           b.grad * a.grad.transpose();
  return r;
}

Jet2 operator*(double c, const Jet2& a) { return {c * a.value, c * a.grad, c * a.hess}; }

Jet2 operator+(double c, const Jet2& a) { return {c + a.value, a.grad, a.hess}; }

Jet2 compose(const Jet2& a, double f, double df, double d2f) {
  Jet2 r;
  r.value = f;
  r.grad = df * a.grad;
  r.hess = d2f * a.grad * a.grad.transpose() + df * a.hess;
  return r;
}

Jet2 pow(const Jet2& a, double e) {
  const double v = a.value;
  return compose(a, std::pow(v, e), e * std::pow(v, e - 1), e * (e - 1) * std::pow(v, e - 2));
}

Jet2 exp(const Jet2& a) {
  const double v = std::exp(a.value);
  return compose(a, v, v, v);
}

Jet2 log(const Jet2& a) {
  const double v = a.value;
  return compose(a, std::log(v), 1 / v, -1 / (v * v));
}

Jet2 rho_jet(const GaugeJets& j) { return {j.rho, j.grad, j.hess}; }

Jet2 coordinate_jet(const GrushinSpace& s, const Point& p, int l) {
  const int N = s.N(), m = s.m();
  const double g = s.gamma();
  Jet2 r = Jet2::constant(N, p.coord(l));
  if (l < m) {
    r.grad[l] = 1;
    return r;
  }
  const double zn = p.z.norm();
  r.grad[l] = std::pow(zn, g);
  for (int i = 0; i < m; ++i) r.hess(i, l) = g * std::pow(zn, g - 2) * p.z[i];
  return r;
}

Jet2 znorm_jet(const GrushinSpace& s, const Point& p) {
  const int N = s.N(), m = s.m();
  const double zn = p.z.norm();
  if (zn == 0) throw DomainError("|z| is not differentiable at z = 0");
  Jet2 r = Jet2::constant(N, zn);
  for (int i = 0; i < m; ++i) {
    r.grad[i] = p.z[i] / zn;
    for (int j = 0; j < m; ++j)
      r.hess(i, j) = (i == j ? 1.0 / zn : 0.0) - p.z[i] * p.z[j] / (zn * zn * zn);
  }
  return r;
}

ScalarField field_from_jets(JetFunction f) {
  ScalarField out([f](const Point& p) { return f(p).value; });
  out.with_gradient([f](const Point& p) { return f(p).grad; });
  out.with_hessian([f](const Point& p) { return f(p).hess; });
  return out;
}

}  // namespace grushin
