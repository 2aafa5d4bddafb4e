#pragma once

#include <cstdint>
#include <vector>

#include "grushin/operators.hpp"
#include "grushin/report.hpp"

namespace grushin {

// Closed-form X-derivatives of ρ (orders 1–3) and ψ against nested quad-precision differences,
// within max(1e-6 relative, oracle error) at points with |z| ≥ 0.1.
struct LadderOptions {
  std::size_t points = 200;
  std::uint64_t seed = 19;
  double rel_tol = 1e-6;
  int threads = 1;
};

VerificationReport derivative_ladder(const GrushinSpace& s, const LadderOptions& opt = {});

// Zρ = ρ, Zψ = 0, |Xρ|² = ψ, Fρ = ρ, Fv = Zv for A = I, the radial identity and 𝓛ρ^{2−Q} = 0 for A = I.
struct IdentityOptions {
  std::size_t points = 100;
  std::uint64_t seed = 41;
  double rel_tol = 1e-8;
};

VerificationReport exact_identities(const CoefficientField& A, const IdentityOptions& opt = {});

// Normalized Rellich residual over every (A, u) pair on successive Cartesian grids.
struct RellichOptions {
  std::vector<int> grids{32, 64, 128, 256};
  double min_order = 2.0;
  double max_final = 1e-3;
  AnnulusDomain domain{0.1, 0.9};
  int threads = 1;
};

VerificationReport rellich_suite(const std::vector<CoefficientPtr>& families, const RellichOptions& opt = {});

// ∫_{B_r} ψ over a radius list; the fitted log-log exponent must be Q.
struct ScalingOptions {
  std::vector<double> radii{1.0, 0.5, 0.25};
  double tolerance = 0.05;
  QuadratureGrid grid;
};

VerificationReport psi_mass_scaling(const GrushinSpace& s, const ScalingOptions& opt = {});

}  // namespace grushin
