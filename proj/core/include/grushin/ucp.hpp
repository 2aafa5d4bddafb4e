#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "grushin/operators.hpp"
#include "grushin/potentials.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

// Node grid on the gauge bounding box [−r,r]^m × [−r^{γ+1}/(γ+1), r^{γ+1}/(γ+1)]^k of B_r,
// the same node count on every axis. Odd counts put z = 0 and t = 0 on grid lines.
struct FDGrid {
  int n = 33;
  double r_out = 1.0;

  void validate() const;
  FDGrid refined() const { return {2 * (n - 1) + 1, r_out}; }
};

using PointFunction = std::function<double(const Point&)>;

struct SolverOptions {
  double tol = 1e-12;   // relative residual ‖b − Au‖/‖b‖
  int max_iter = 20000;
};

struct DiscreteSolution {
  GrushinSpace space{1, 1, 1.0};
  FDGrid grid;
  AnnulusDomain domain;
  std::vector<double> values;       // every node, axis 0 fastest
  std::vector<char> fixed;          // Dirichlet nodes
  double residual = 0;              // relative residual of the discrete equation
  int iterations = 0;               // CG iterations (summed over fixed-point steps)
  bool converged = false;
  std::vector<double> history;      // sublinear: sup-norm change per fixed-point step

  std::size_t size() const { return values.size(); }
  Point node(std::size_t i) const;
  double spacing(int axis) const;
  double cell_volume() const;
  double max_error(const PointFunction& exact) const;  // over free nodes
  double l2_norm() const;                              // (Σ u² · cell volume)^{1/2} over free nodes
  std::string to_csv() const;
};

// Interior nodes (ρ strictly between r_in and r_out) are unknowns; the rest carry boundary data.
// Solves 𝓛u = Vu + s, i.e. (−𝓛_h + V)u = −s, with face-averaged divergence-form coefficients.
DiscreteSolution solve_linear(const DegenerateOperator& op, const PotentialSpec& V, const AnnulusDomain& d,
                              const PointFunction& boundary, const FDGrid& grid, const SolverOptions& opt = {},
                              const PointFunction& source = {});

struct SublinearOptions {
  double tol = 1e-10;      // sup-norm change between iterates
  double damping = 1.0;    // u ← (1−ω)u + ω·T(u)
  int max_iter = 200;
  SolverOptions linear;
};

// −𝓛u = f(u)ψ + Vu by damped fixed point u_{n+1} = solve(−𝓛w = f(u_n)ψ + Vu_n), starting from the
// linear solve with f dropped. Non-contraction is reported through converged = false and the history.
DiscreteSolution solve_sublinear(const DegenerateOperator& op, const PotentialSpec& f, const PotentialSpec& V,
                                 const AnnulusDomain& d, const PointFunction& boundary, const FDGrid& grid,
                                 const SublinearOptions& opt = {});

// 𝓛_h applied to node samples of u; entries at non-interior nodes are NaN.
std::vector<double> apply_discrete(const DegenerateOperator& op, const FDGrid& grid, const AnnulusDomain& d,
                                   const std::vector<double>& u);

// Largest |𝓛_h u − 𝓛u| over interior nodes with |z| ≥ min_znorm, for u with analytic jets.
double consistency_error(const DegenerateOperator& op, const FDGrid& grid, const AnnulusDomain& d,
                         const JetFunction& u, double min_znorm);

struct VanishingOrderReport {
  std::vector<double> radii;      // strictly decreasing
  std::vector<double> sup;        // sup_{B_r}|u|
  std::vector<double> integral;   // ∫_{B_r} u²ψ
  double sup_slope = 0;
  double integral_slope = 0;
  double logsq_rate = 0;          // k in log ∫_{B_r}u²ψ ≈ c − k (log r)²
};

// Profiles over the unknowns only, so an inner Dirichlet hole does not enter.
VanishingOrderReport vanishing_order(const DiscreteSolution& u, const std::vector<double>& radii);
VanishingOrderReport vanishing_order(const GrushinSpace& s, const ScalarField& u, const std::vector<double>& radii,
                                     const QuadratureGrid& g = {});

// slope ≈ a·K^e + b with e on a grid in [0, 2] and (a, b) by least squares.
struct ExponentFit {
  double e = 0, a = 0, b = 0;
  double rms = 0;
};
ExponentFit fit_exponent(const std::vector<double>& K, const std::vector<double>& slope);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// One space of the grid matrix with its node counts per axis.
struct UcpSpace {
  double gamma = 1;
  int m = 1, k = 1;
  std::vector<int> grids{17, 33, 65, 129};
};

struct UcpOptions {
  std::vector<UcpSpace> spaces{{1.0, 1, 1, {17, 33, 65, 129}}, {0.5, 2, 1, {9, 17, 33, 65}}};
  double annulus_inner = 0.25;
  double potential_K = 10;
  // Sublinear run and the K-sweep use the first space.
  double sublinear_q = 1.5, sublinear_c = 0.5;
  int sublinear_grid = 65;
  std::vector<double> K{1, 10, 100, 1000};
  int sweep_grid = 65;
  std::vector<double> radii{0.5, 0.4, 0.3, 0.2, 0.15, 0.1};
  double hardy_inner = 0.05;
  double hardy_C = 10.0;
  SolverOptions solver;
  double exact_tolerance = 1e-8;
  double min_order = 1.8;
  double max_exponent = 1.0;
  int threads = 1;

  void validate() const;
};

// Fixed oscillatory data for the K-sweep.
double oscillatory_boundary(const Point& p);

using CoefficientFactory = std::function<CoefficientPtr(const GrushinSpace&)>;

// Exact solutions over the grid matrix, discrete consistency, the K = 10 refinement study, the sublinear
// solve, the K-sweep and the Hardy diagnostic.
VerificationReport ucp_experiments(const CoefficientFactory& coeff, const UcpOptions& opt);

}  // namespace grushin
