#include "grushin/sampling.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

namespace grushin {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61};

// Unit vector in ℝ^d from d uniforms.
Vec direction(const double* u, int d) {
  Vec v(d);
  if (d == 0) return v;
  if (d == 1) {
    v[0] = u[0] < 0.5 ? -1.0 : 1.0;
    return v;
  }
  if (d == 2) {
    const double a = 2 * std::numbers::pi * u[0];
    v << std::cos(a), std::sin(a);
    return v;
  }
  static const boost::math::normal_distribution<double> nd;
  for (int i = 0; i < d; ++i) {
    const double x = std::min(std::max(u[i], 1e-12), 1 - 1e-12);
    v[i] = boost::math::quantile(nd, x);
  }
  const double n = v.norm();
  if (n == 0) v[0] = 1;
  else v /= n;
  return v;
}

int direction_dims(int d) { return d <= 2 ? std::min(d, 1) : d; }

}  // namespace

double radical_inverse(std::uint64_t n, int base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (n > 0) {
    r += f * double(n % std::uint64_t(base));
    n /= std::uint64_t(base);
    f *= inv;
  }
  return r;
}

Point polar_point(const GrushinSpace& s, double rho, double psi, const Vec& zdir, const Vec& tdir) {
  const double g = s.gamma(), g1 = g + 1;
  if (s.k() == 0) psi = 1;
  const double a = std::pow(psi, 1 / (2 * g));
  const double tmag = std::pow(rho, g1) * std::sqrt(std::max(0.0, 1 - std::pow(a, 2 * g1))) / g1;
  Point p;
  p.z = rho * a * zdir;
  p.t = tmag * tdir;
  return p;
}

std::vector<Point> sample_cloud(const GrushinSpace& s, const SampleSpec& spec) {
  const int dz = direction_dims(s.m()), dt = direction_dims(s.k());
  const int dims = 2 + dz + dt;
  if (dims > int(std::size(kPrimes))) throw DimensionError("too many sampling dimensions");
  std::vector<Point> out;
  out.reserve(spec.count);
  std::vector<double> u(std::size_t(dims), 0.0);
  // Skip a seed-dependent prefix; the first indices of a Halton sequence are strongly correlated.
  std::uint64_t n = 20 + (spec.seed % 100003) * 7;
  const double lr0 = std::log(spec.rho_min), lr1 = std::log(spec.rho_max);
  const double lp0 = std::log(spec.psi_min), lp1 = std::log(spec.psi_max);
  std::size_t guard = 0;
  while (out.size() < spec.count) {
    ++n;
    if (++guard > 100 * spec.count + 1000) throw DomainError("sample specification rejects all points");
    for (int d = 0; d < dims; ++d) u[std::size_t(d)] = radical_inverse(n, kPrimes[d]);
    const double rho = std::exp(lr0 + u[0] * (lr1 - lr0));
    const double psi = std::exp(lp0 + u[1] * (lp1 - lp0));
    const Vec zd = direction(&u[2], s.m() <= 2 ? s.m() : dz);
    const Vec td = direction(&u[std::size_t(2 + dz)], s.k() <= 2 ? s.k() : dt);
    Point p = polar_point(s, rho, psi, zd, td);
    if (p.z.norm() < spec.min_znorm) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace grushin
