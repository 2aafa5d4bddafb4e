#pragma once

#include <array>
#include <functional>

#include "grushin/coefficients.hpp"
#include "grushin/jet.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

// 𝓛 = Σ X_i(a_ij X_j); with A = I this is Δ_z + |z|^{2γ}Δ_t.
class DegenerateOperator {
 public:
  explicit DegenerateOperator(CoefficientPtr A);

  const GrushinSpace& space() const { return A_->space(); }
  const CoefficientField& coeff() const { return *A_; }
  const CoefficientPtr& coeff_ptr() const { return A_; }

 private:
  CoefficientPtr A_;
};

// Value, X-gradient and X-Hessian of u at p: analytic when u carries them, else nested differences.
Jet2 jet_at(const GrushinSpace& s, const ScalarField& u, const Point& p);

// Σ_ij (X_i a_ij) X_j u + a_ij X_i X_j u from precomputed a and da[i] = X_i a.
double apply_L(const Mat& a, const std::vector<Mat>& da, const Jet2& u);
double apply_L(const CoefficientField& A, const Jet2& u, const Point& p);
double apply_L(const DegenerateOperator& op, const ScalarField& u, const Point& p);
// Δ_z u + |z|^{2γ}Δ_t u as the trace of the X-Hessian.
double grushin_apply(const Jet2& u);

// [X_j, X_l]u for all (j, l) contracted against a vector c over l: Σ_l c_l [X_j, X_l]u, row j.
Vec commutator_contraction(const GrushinSpace& s, const Point& p, const Vec& c, const Vec& xu);

struct RadialProfile {
  std::function<double(double)> f, df, d2f;
};

// ψ (f''(ρ) + (Q−1) f'(ρ)/ρ); with cross_check the value is compared with 𝓛(f∘ρ) for A = I.
double radial_apply(const GrushinSpace& s, const RadialProfile& f, const Point& p, bool cross_check = false);

// G = φ(ρ) F with φ = ρ^a or ρ^a(−log ρ).
struct RellichField {
  double a = 0;
  bool log_factor = false;

  double phi(double rho) const;
  double dphi(double rho) const;
};

struct RellichResult {
  // −2∫a_ij X_iu [X_j,G]u, ∫div G ⟨AXu,Xu⟩, ∫⟨(GA)Xu,Xu⟩, −2∫Gu 𝓛u
  std::array<IntegralEstimate, 4> terms{};
  double sum = 0;
  double scale = 0;     // largest |term|
  double residual = 0;  // |sum| / scale
  double residual_error = 0;
};

// Integrands of the four Rellich terms at p.
std::array<double, 4> rellich_integrands(const CoefficientField& A, const RellichField& G, const Jet2& u,
                                         const Point& p);

RellichResult rellich_residual(const DegenerateOperator& op, const ScalarField& u, const RellichField& G,
                               const AnnulusDomain& d, const QuadratureGrid& g);

// Largest |u| and |Xu| on the gauge sphere of radius r, from a low-discrepancy sample.
double sphere_sup(const GrushinSpace& s, const ScalarField& u, double r, int samples = 2000);

}  // namespace grushin
