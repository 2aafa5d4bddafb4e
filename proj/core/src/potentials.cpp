#include "grushin/potentials.hpp"

#include <cmath>

#include "grushin/sampling.hpp"

namespace grushin {

std::string PotentialSpec::name() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::bounded: return "bounded";
    case Kind::c1: return "c1";
    case Kind::hardy: return "hardy";
    case Kind::sublinear: return "sublinear";
  }
  return "none";
}

Jet2 PotentialSpec::V(const GrushinSpace& s, const Point& p) const {
  const int N = s.N();
  if (!has_potential() || K == 0) return Jet2::constant(N, 0.0);
  const double g = s.gamma(), g1 = g + 1;
  const Jet2 rho = rho_jet(GaugeJets(s, p));
  const Jet2 psi = pow(znorm_jet(s, p), 2 * g) * pow(rho, -2 * g);
  const Jet2 tau = g1 * (coordinate_jet(s, p, s.m()) * pow(rho, -g1));
  Jet2 v = (amplitude * K) * (psi * (1.0 + modulation * tau));
  if (kind == Kind::hardy) v = v * pow(rho, -2.0);
  return v;
}

double PotentialSpec::value(const GrushinSpace& s, const Point& p) const {
  if (!has_potential() || K == 0) return 0.0;
  const auto gv = gauge_and_angle(s, p);
  if (gv.rho == 0) {
    if (kind == Kind::hardy) throw DomainError("hardy potential at the origin");
    return 0.0;
  }
  const double tau = (s.gamma() + 1) * p.t[0] / std::pow(gv.rho, s.gamma() + 1);
  double v = amplitude * K * gv.psi * (1 + modulation * tau);
  if (kind == Kind::hardy) v /= gv.rho * gv.rho;
  return v;
}

double PotentialSpec::f(double u) const {
  if (kind != Kind::sublinear || u == 0 || c == 0) return 0.0;
  return c * std::pow(std::abs(u), q - 2) * u;
}

double PotentialSpec::G(double u) const {
  if (kind != Kind::sublinear || c == 0) return 0.0;
  return c * std::pow(std::abs(u), q) / q;
}

VerificationReport potential_check(const PotentialSpec& V, const CoefficientField& A, const SampleSpec& spec) {
  VerificationReport rep;
  const GrushinSpace& s = A.space();
  CheckRecord r;
  r.name = "potential." + V.name();
  r.anchor = anchors::carleman_potential;
  if (V.kind == PotentialSpec::Kind::sublinear) {
    double worst_sf = 0, c0 = 1e300, c1 = 0;
    bool sign_ok = V.f(0.0) == 0.0;
    for (int i = 1; i < 2000; ++i) {
      const double x = -1 + 2.0 * i / 2000;
      if (x == 0) continue;
      const double sf = x * V.f(x), G = V.G(x);
      sign_ok = sign_ok && (V.c == 0 || sf > 0);
      if (G > 0) worst_sf = std::max(worst_sf, sf / (V.q * G));
      c0 = std::min(c0, G / std::pow(std::abs(x), V.q));
      c1 = std::max(c1, G / std::pow(std::abs(x), V.q));
    }
    r.values = {{"max_sf_over_qG", worst_sf}, {"c0", c0}, {"c1", c1}, {"q", V.q}, {"sign_positive", sign_ok}};
    r.tolerance = 1e-12;
    r.verdict = sign_ok && worst_sf <= 1 + 1e-12 && c0 > 0 ? Verdict::pass : Verdict::fail;
    rep.add(r);
    return rep;
  }
  double worst = 0;
  std::size_t skipped = 0;
  for (const Point& p : sample_cloud(s, spec)) {
    if (p.z.norm() == 0) {
      ++skipped;
      continue;
    }
    const auto gv = gauge_and_angle(s, p);
    const Jet2 v = V.V(s, p);
    double lhs = std::abs(v.value);
    if (V.kind == PotentialSpec::Kind::c1) lhs += std::abs(derived_at(A, s, p).F_coeffs.dot(v.grad));
    double bound = V.K * gv.psi;
    if (V.kind == PotentialSpec::Kind::hardy) bound /= gv.rho * gv.rho;
    if (bound > 0) worst = std::max(worst, lhs / bound);
  }
  r.values = {{"max_ratio", worst}, {"K", V.K}, {"points", spec.count}, {"skipped", skipped}};
  r.tolerance = 1.0;
  r.verdict = worst <= 1.0 ? Verdict::pass : Verdict::fail;
  rep.add(r);
  return rep;
}

}  // namespace grushin
