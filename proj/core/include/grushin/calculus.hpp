#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "grushin/geometry.hpp"

namespace grushin {

// A function of (z,t). Analytic X-derivatives and a quad-precision evaluator are optional.
// Hessian convention: entry (i,j) is X_i(X_j f), row = outer field.
class ScalarField {
 public:
  using Eval = std::function<double(const Point&)>;
  using QuadEval = std::function<Quad(const QPoint&)>;
  using Grad = std::function<Vec(const Point&)>;
  using Hess = std::function<Mat(const Point&)>;

  ScalarField() = default;
  explicit ScalarField(Eval f) : eval_(std::move(f)) {}

  ScalarField& with_quad(QuadEval f) { quad_ = std::move(f); return *this; }
  ScalarField& with_gradient(Grad g) { grad_ = std::move(g); return *this; }
  ScalarField& with_hessian(Hess h) { hess_ = std::move(h); return *this; }

  double operator()(const Point& p) const { return eval_(p); }
  Quad operator()(const QPoint& p) const { return quad_(p); }

  bool has_quad() const { return bool(quad_); }
  bool has_gradient() const { return bool(grad_); }
  bool has_hessian() const { return bool(hess_); }

  Vec x_gradient(const Point& p) const { return grad_(p); }
  Mat x_hessian(const Point& p) const { return hess_(p); }

  static ScalarField constant(double c);

 private:
  Eval eval_;
  QuadEval quad_;
  Grad grad_;
  Hess hess_;
};

// Euclidean coefficient vector of a first-order operator at p.
using VectorField = std::function<Vec(const Point&)>;

VectorField x_field(const GrushinSpace& s, int l);
VectorField generator_field(const GrushinSpace& s);

struct FdOptions {
  double order1_step = 1e-5;
  double higher_step = 1e-4;
  // false: step scale max(1,ρ); true: min(|z|, max(1,ρ)) so that stencils stay off z = 0.
  bool local_scale = false;
  bool use_quad = true;
};

struct FdEstimate {
  double value = 0;
  double error = 0;
};

// Nested central differences for X_{fields[0]} X_{fields[1]} ... f (outer first), one Richardson halving.
FdEstimate fd_oracle(const GrushinSpace& s, const ScalarField& f, const Point& p,
                     std::span<const int> fields, const FdOptions& opt = {});
FdEstimate fd_oracle(const GrushinSpace& s, const ScalarField& f, const Point& p,
                     std::initializer_list<int> fields, const FdOptions& opt = {});

// Same along arbitrary vector fields (double precision).
FdEstimate fd_along(const GrushinSpace& s, const ScalarField& f, const Point& p,
                    std::span<const VectorField> fields, const FdOptions& opt = {});

double fd_step(const GrushinSpace& s, const Point& p, int order, const FdOptions& opt);

double x_apply(const GrushinSpace& s, int i, const ScalarField& f, const Point& p);
Vec x_gradient(const GrushinSpace& s, const ScalarField& f, const Point& p);
double generator_apply(const GrushinSpace& s, const ScalarField& f, const Point& p);

// Closed-form derivatives of ρ and ψ; requires z ≠ 0.
class GaugeJets {
 public:
  GaugeJets(const GrushinSpace& s, const Point& p);

  double rho = 0;
  double psi = 0;
  double znorm = 0;
  Vec grad;      // X_l ρ
  Mat hess;      // X_i(X_j ρ)
  Vec psi_grad;  // X_l ψ

  // X_r(X_i(X_j ρ)).
  double third(int r, int i, int j) const;

 private:
  // Second derivatives as c1·ψ²/ρ³ + c2·ψ/ρ; these return c1, c2 and their X_r derivatives.
  void split(int i, int j, double& c1, double& c2) const;
  void split_derivative(int r, int i, int j, double& dc1, double& dc2) const;
  double kappa(int r, double a, double b) const;

  int m_;
  double g_;
  Point p_;
};

Vec psi_x_gradient(const GrushinSpace& s, const Point& p);

ScalarField rho_field(const GrushinSpace& s);
ScalarField psi_field(const GrushinSpace& s);
ScalarField coordinate_field(const GrushinSpace& s, int l);

}  // namespace grushin
