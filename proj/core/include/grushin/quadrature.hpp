#pragma once

#include <functional>
#include <span>
#include <vector>

#include "grushin/coefficients.hpp"

namespace grushin {

// Gauge annulus r_in ≤ ρ ≤ r_out; r_in = 0 is the ball.
struct AnnulusDomain {
  double r_in = 0;
  double r_out = 1;

  void validate() const;
  bool contains(double rho) const { return rho >= r_in && rho <= r_out; }
};

// Cartesian cell grid on [-r,r]^m × [-r^{γ+1}/(γ+1), r^{γ+1}/(γ+1)]^k with r = r_out.
struct QuadratureGrid {
  int n_z = 64;               // cells per z-axis, even so that z = 0 is a cell face
  double t_factor = 1.0;      // cells per t-axis = n_z · t_factor
  int char_refine = 2;        // z-subdivision of cells with |z| below char_threshold·r_out
  double char_threshold = 0.1;
  int boundary_samples = 4;   // sub-samples per axis in cells cut by a gauge sphere
  int inner_refine = 2;       // extra factor for cells cut by the inner sphere
  int threads = 1;

  void validate() const;
  int n_t() const;
  QuadratureGrid halved() const;
  QuadratureGrid doubled() const;
};

// ρ^a · {1, e^{2αρ^ε}, e^{β(log ρ)²}} · {1, ψ, μ, 1/μ}, evaluated in the log domain and divided
// by e^{log_reference} so that large-parameter weights stay representable.
struct WeightedIntegral {
  enum class Kind { power, power_exp, power_logsq };
  enum class Factor { none, psi, mu, inv_mu };

  Kind kind = Kind::power;
  Factor factor = Factor::none;
  double a = 0;
  double alpha = 0;
  double beta = 0;
  double epsilon = 0.5;
  double log_reference = 0;
  CoefficientPtr coeff;  // needed for μ factors

  void validate() const;
  double log_radial(double rho) const;
  // d/dρ of log_radial.
  double log_radial_slope(double rho) const;
  double operator()(const GrushinSpace& s, const Point& p, double rho, double psi) const;

  static WeightedIntegral power(double a) {
    WeightedIntegral w;
    w.a = a;
    return w;
  }
};

struct IntegralEstimate {
  double value = 0;
  double error = 0;
  std::size_t cells = 0;
  std::size_t samples = 0;
};

using Integrand = std::function<double(const Point&)>;
// Writes several integrands at once into out (size fixed by the caller).
using MultiIntegrand = std::function<void(const Point&, std::span<double> out)>;

// Midpoint rule on the cell grid with the gauge annulus as indicator; error from one halving.
IntegralEstimate integrate(const GrushinSpace& s, const AnnulusDomain& d, const QuadratureGrid& g,
                           const Integrand& f, const WeightedIntegral& w = {});
std::vector<IntegralEstimate> integrate_many(const GrushinSpace& s, const AnnulusDomain& d,
                                             const QuadratureGrid& g, int count,
                                             const MultiIntegrand& f, const WeightedIntegral& w = {});
// Single pass without the error estimate.
std::vector<double> integrate_once(const GrushinSpace& s, const AnnulusDomain& d,
                                   const QuadratureGrid& g, int count, const MultiIntegrand& f,
                                   const WeightedIntegral& w, std::size_t* cells = nullptr,
                                   std::size_t* samples = nullptr);

// ∫_{B_r} u² ψ.
IntegralEstimate vanishing_profile_integral(const GrushinSpace& s, const ScalarField& u, double r,
                                            const QuadratureGrid& g = {});

// Gauge-polar product rule: |z| = ρ sin φ, |t| = ρ^{γ+1} (1 − sin^{2γ+2}φ)^{1/2}/(γ+1),
// composite Gauss in ρ (panels graded away from r_in) and φ, product rules on the z- and t-spheres.
struct PolarGrid {
  int gauss = 8;            // points per panel
  int radial_panels = 16;   // panel width cap is (r_out - r_in)/radial_panels
  int angle_panels = 12;    // panels in φ ∈ [0, π/2]
  int sphere_points = 16;   // points on a circle; higher spheres use a product rule
  // Radial grading: first panel width 0.5/slope at r_in, geometric growth 15%, capped.
  double grading_slope = 0;
  double growth = 0.15;

  void validate() const;
  PolarGrid coarsened() const;
};

struct PolarNode {
  Point p;
  double rho = 0;
  double psi = 0;
  double weight = 0;  // Lebesgue measure dz dt
};

void for_each_polar_node(const GrushinSpace& s, const AnnulusDomain& d, const PolarGrid& g,
                         const std::function<void(const PolarNode&)>& visit);
// |z| ∈ [z_lo, z_hi], t_1 ∈ [t_lo, t_hi], |t_j| ≤ t_w for j > 1.
struct TensorBox {
  double z_lo = 0, z_hi = 1;
  double t_lo = -1, t_hi = 1;
  double t_w = 1;

  void validate() const;
};

// Product Gauss rule on a box in (|z|, z/|z|, t) whose panels are graded toward the point of least
// gauge; uses the panel, growth and grading settings of g.
void for_each_box_node(const GrushinSpace& s, const TensorBox& b, const PolarGrid& g,
                       const std::function<void(const PolarNode&)>& visit);

std::vector<PolarNode> polar_nodes(const GrushinSpace& s, const AnnulusDomain& d, const PolarGrid& g);

// Points and weights of a product rule on the unit sphere S^{d-1} (d ≥ 1) with total mass |S^{d-1}|.
void sphere_rule(int d, int circle_points, std::vector<Vec>& pts, std::vector<double>& wts);

// Lebesgue measure of the unit gauge ball from the polar rule.
double unit_ball_volume(const GrushinSpace& s, const PolarGrid& g = {});

}  // namespace grushin
