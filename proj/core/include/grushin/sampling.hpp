#pragma once

#include <cstdint>
#include <vector>

#include "grushin/geometry.hpp"

namespace grushin {

// Low-discrepancy cloud in gauge-polar coordinates: ρ and ψ log-uniform, directions uniform.
// Clouds with the same seed are nested: the first n points do not depend on the total count.
struct SampleSpec {
  std::size_t count = 1000;
  double rho_min = 0.01;
  double rho_max = 1.0;
  double psi_min = 1e-3;
  double psi_max = 1.0;
  double min_znorm = 0.0;
  std::uint64_t seed = 1;
};

std::vector<Point> sample_cloud(const GrushinSpace& s, const SampleSpec& spec);

// Radical inverse of n in the given prime base.
double radical_inverse(std::uint64_t n, int base);

// Point with prescribed gauge, angle and unit directions.
Point polar_point(const GrushinSpace& s, double rho, double psi, const Vec& zdir, const Vec& tdir);

}  // namespace grushin
