#pragma once

#include <string>

#include "grushin/coefficients.hpp"
#include "grushin/jet.hpp"
#include "grushin/report.hpp"

namespace grushin {

// Zero-order terms of the Carleman estimates and the lab equations.
struct PotentialSpec {
  enum class Kind { none, bounded, c1, hardy, sublinear };

  Kind kind = Kind::none;
  double K = 0;        // |V| ≤ Kψ (bounded), |V| + |FV| ≤ Kψ (c1), |V| ≤ Kψ/ρ² (hardy)
  double modulation = 0.5;  // V = aKψ(1 + modulation·τ) for bounded/c1, aKψ/ρ²(1 + modulation·τ) for hardy
  // sublinear: f(s) = c|s|^{q−2}s, G(s) = c|s|^q/q
  double q = 1.5;
  double c = 1.0;
  double amplitude = 0.5;   // a above

  // V = Kψ exactly (or Kψ/ρ² for hardy).
  static PotentialSpec plain(Kind kind, double K) {
    PotentialSpec p{kind, K, 0.0};
    p.amplitude = 1.0;
    return p;
  }
  static PotentialSpec bounded_kpsi(double K) { return plain(Kind::bounded, K); }
  static PotentialSpec modulated(Kind kind, double K) { return {kind, K, 0.5}; }
  static PotentialSpec sublinear(double q, double c) {
    PotentialSpec p;
    p.kind = Kind::sublinear;
    p.q = q;
    p.c = c;
    return p;
  }

  bool has_potential() const { return kind == Kind::bounded || kind == Kind::c1 || kind == Kind::hardy; }
  std::string name() const;

  // V with analytic X-gradient.
  Jet2 V(const GrushinSpace& s, const Point& p) const;
  // Value only; finite on z = 0 (and at the origin unless hardy).
  double value(const GrushinSpace& s, const Point& p) const;
  double f(double u) const;
  double G(double u) const;
};

// Samples the structural assumptions: |V| (+|FV|) against the declared bound, or for sublinear terms
// f(0) = 0, 0 < s f(s) ≤ q G(s) and c₀ s^q ≤ G ≤ c₁ s^p.
VerificationReport potential_check(const PotentialSpec& V, const CoefficientField& A, const SampleSpec& spec);

}  // namespace grushin
