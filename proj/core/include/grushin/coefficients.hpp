#pragma once

#include <memory>
#include <string>
#include <vector>

#include "grushin/calculus.hpp"
#include "grushin/report.hpp"
#include "grushin/sampling.hpp"

namespace grushin {

// Symmetric coefficient matrix A(z,t) with ellipticity λ and structural constant Λ.
class CoefficientField {
 public:
  CoefficientField(GrushinSpace s, double lambda, double Lambda)
      : space_(s), lambda_(lambda), Lambda_(Lambda) {}
  virtual ~CoefficientField() = default;

  virtual Mat a(const Point& p) const = 0;
  // X_l a_ij; the default uses central differences in double precision.
  virtual Mat x_derivative(int l, const Point& p) const;
  virtual bool analytic_derivatives() const { return false; }
  virtual std::string name() const = 0;

  Mat b(const Point& p) const { return a(p) - Mat::Identity(space_.N(), space_.N()); }
  const GrushinSpace& space() const { return space_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }

 protected:
  GrushinSpace space_;
  double lambda_;
  double Lambda_;
};

using CoefficientPtr = std::shared_ptr<const CoefficientField>;

class IdentityCoefficients final : public CoefficientField {
 public:
  explicit IdentityCoefficients(GrushinSpace s) : CoefficientField(s, 1.0, 0.0) {}
  Mat a(const Point& p) const override;
  Mat x_derivative(int l, const Point& p) const override;
  bool analytic_derivatives() const override { return true; }
  std::string name() const override { return "identity"; }
};

// A11 = (1+ρf) I_m, A12 = |z|^{γ+1} g E, A22 = (1+|z|^{γ+1}h) I_k with E the m×k matrix with
// ones on its diagonal, and f, g, h affine in z_1: f = f0 + f1·z_1 and so on.
struct ExampleParams {
  double f0 = 0.1, f1 = 0.0;
  double g0 = 0.1, g1 = 0.0;
  double h0 = 0.1, h1 = 0.0;
};

class ExampleCoefficients final : public CoefficientField {
 public:
  ExampleCoefficients(GrushinSpace s, ExampleParams prm, double lambda = 0.5, double Lambda = 1.0)
      : CoefficientField(s, lambda, Lambda), prm_(prm) {}
  Mat a(const Point& p) const override;
  Mat x_derivative(int l, const Point& p) const override;
  bool analytic_derivatives() const override { return true; }
  std::string name() const override { return "example"; }
  const ExampleParams& params() const { return prm_; }

 private:
  ExampleParams prm_;
};

// a_11 = 1 + c ρ^{1/2}: breaks |b_11| ≤ Λρ near the origin.
class ViolatingCoefficients final : public CoefficientField {
 public:
  ViolatingCoefficients(GrushinSpace s, double c, double lambda = 0.5, double Lambda = 1.0)
      : CoefficientField(s, lambda, Lambda), c_(c) {}
  Mat a(const Point& p) const override;
  Mat x_derivative(int l, const Point& p) const override;
  bool analytic_derivatives() const override { return true; }
  std::string name() const override { return "violating"; }

 private:
  double c_;
};

class FunctionCoefficients final : public CoefficientField {
 public:
  FunctionCoefficients(GrushinSpace s, std::function<Mat(const Point&)> f, std::string name,
                       double lambda = 0.5, double Lambda = 1.0)
      : CoefficientField(s, lambda, Lambda), f_(std::move(f)), name_(std::move(name)) {}
  Mat a(const Point& p) const override { return f_(p); }
  std::string name() const override { return name_; }

 private:
  std::function<Mat(const Point&)> f_;
  std::string name_;
};

struct DerivedQuantities {
  double mu = 0;
  double sigma = 0;
  Vec F_coeffs;  // c_j = (ρ/μ) Σ_i a_ij X_iρ, so F = Σ_j c_j X_j
};

DerivedQuantities derived_at(const CoefficientField& A, const GrushinSpace& s, const Point& p);
double F_apply(const CoefficientField& A, const GrushinSpace& s, const ScalarField& f, const Point& p);

// Everything the structural estimates need at one point, with analytic first X-derivatives.
struct PointGeometry {
  PointGeometry(const CoefficientField& A, const Point& p);

  GaugeJets jets;
  Mat a;
  std::vector<Mat> da;  // da[l] = X_l a
  double mu = 0, sigma = 0;
  Vec dmu, dsigma;      // X_l μ, X_l σ
  Vec c;                // F coefficients
  Mat dc;               // dc(l,j) = X_l c_j
  double divF = 0;

  Mat b() const { return a - Mat::Identity(a.rows(), a.cols()); }
  // X_l of v_i = Σ_j M_ij X_jρ given M and its derivatives; row l, column i.
  Mat d_contraction(const Mat& M, const std::vector<Mat>& dM) const;
};

// Checks |λ|-ellipticity of A at p; returns the eigenvalue range.
std::pair<double, double> eigen_range(const Mat& a);

VerificationReport hypothesis_check(const CoefficientField& A, const GrushinSpace& s,
                                    const SampleSpec& spec);

}  // namespace grushin
