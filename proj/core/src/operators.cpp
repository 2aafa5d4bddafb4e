#include "grushin/operators.hpp"

#include <cmath>
#include <sstream>

#include "grushin/sampling.hpp"

namespace grushin {

DegenerateOperator::DegenerateOperator(CoefficientPtr A) : A_(std::move(A)) {
  if (!A_) throw Error("operator needs a coefficient field");
}

Jet2 jet_at(const GrushinSpace& s, const ScalarField& u, const Point& p) {
  check_dims(s, p);
  const int N = s.N();
  Jet2 j;
  j.value = u(p);
  FdOptions opt;
  opt.local_scale = p.z.norm() > 0;
  if (u.has_gradient()) {
    j.grad = u.x_gradient(p);
  } else {
    j.grad.resize(N);
    for (int i = 0; i < N; ++i) j.grad[i] = fd_oracle(s, u, p, {i}, opt).value;
  }
  if (u.has_hessian()) {
    j.hess = u.x_hessian(p);
  } else {
    j.hess.resize(N, N);
    for (int i = 0; i < N; ++i)
      for (int l = 0; l < N; ++l) j.hess(i, l) = fd_oracle(s, u, p, {i, l}, opt).value;
  }
  return j;
}

double apply_L(const Mat& a, const std::vector<Mat>& da, const Jet2& u) {
  const int N = int(a.rows());
  double out = 0;
  for (int i = 0; i < N; ++i) {
    out += da[std::size_t(i)].row(i).dot(u.grad);
    out += a.row(i).dot(u.hess.row(i));
  }
  return out;
}

double apply_L(const CoefficientField& A, const Jet2& u, const Point& p) {
  const int N = A.space().N();
  std::vector<Mat> da;
  da.reserve(std::size_t(N));
  for (int l = 0; l < N; ++l) da.push_back(A.x_derivative(l, p));
  return apply_L(A.a(p), da, u);
}

double apply_L(const DegenerateOperator& op, const ScalarField& u, const Point& p) {
  if (p.z.norm() == 0) throw DomainError("𝓛 is evaluated off the characteristic set z = 0");
  return apply_L(op.coeff(), jet_at(op.space(), u, p), p);
}

double grushin_apply(const Jet2& u) { return u.hess.trace(); }

Vec commutator_contraction(const GrushinSpace& s, const Point& p, const Vec& c, const Vec& xu) {
  const int m = s.m(), N = s.N();
  const double zn2 = p.z.squaredNorm();
  if (zn2 == 0) throw DomainError("commutators of X are singular at z = 0");
  const double g = s.gamma();
  Vec out = Vec::Zero(N);
  // [X_i, X_{m+j}] = (γ z_i/|z|²) X_{m+j} and its antisymmetric partner
  double ct = 0;
  for (int l = m; l < N; ++l) ct += c[l] * xu[l];
  for (int i = 0; i < m; ++i) out[i] = g * p.z[i] / zn2 * ct;
  double cz = 0;
  for (int i = 0; i < m; ++i) cz += c[i] * p.z[i];
  for (int l = m; l < N; ++l) out[l] = -g * cz / zn2 * xu[l];
  return out;
}

double radial_apply(const GrushinSpace& s, const RadialProfile& f, const Point& p, bool cross_check) {
  const auto gv = gauge_and_angle(s, p);
  if (gv.at_origin) throw DomainError("radial identity needs p away from the origin");
  const double r = gv.rho;
  const double v = gv.psi * (f.d2f(r) + (s.Q() - 1) * f.df(r) / r);
  if (cross_check) {
    const GaugeJets gj(s, p);
    const Jet2 u = compose(rho_jet(gj), f.f(r), f.df(r), f.d2f(r));
    const double w = grushin_apply(u);
    if (std::abs(w - v) > 1e-8 * std::max({std::abs(v), std::abs(w), gv.psi * std::abs(f.d2f(r))})) {
      std::ostringstream os;
      os.precision(17);
      os << "radial identity mismatch: " << v << " vs " << w;
      throw Error(os.str());
    }
  }
  return v;
}

double RellichField::phi(double rho) const {
  const double v = std::pow(rho, a);
  return log_factor ? -v * std::log(rho) : v;
}

double RellichField::dphi(double rho) const {
  const double v = a * std::pow(rho, a - 1);
  return log_factor ? -v * std::log(rho) - std::pow(rho, a - 1) : v;
}

std::array<double, 4> rellich_integrands(const CoefficientField& A, const RellichField& G, const Jet2& u,
                                         const Point& p) {
  const GrushinSpace& s = A.space();
  const int N = s.N();
  if (u.value == 0 && u.grad.isZero(0)) return {0, 0, 0, 0};
  const PointGeometry pg(A, p);
  const double rho = pg.jets.rho;
  const double phi = G.phi(rho), dphi = G.dphi(rho);
  const Vec& xu = u.grad;
  const Vec axu = pg.a * xu;
  const double energy = axu.dot(xu);
  const double Fu = pg.c.dot(xu);
  // [X_j, F]u = Σ_l (X_j c_l) X_l u + c_l [X_j, X_l]u
  const Vec commF = pg.dc * xu + commutator_contraction(s, p, pg.c, xu);
  const Vec commG = phi * commF + dphi * Fu * pg.jets.grad;
  const double divG = dphi * rho + phi * pg.divF;
  Mat GA = Mat::Zero(N, N);
  for (int l = 0; l < N; ++l) GA += pg.c[l] * pg.da[std::size_t(l)];
  GA *= phi;
  const double Lu = apply_L(pg.a, pg.da, u);
  return {-2 * axu.dot(commG), divG * energy, xu.dot(GA * xu), -2 * phi * Fu * Lu};
}

double sphere_sup(const GrushinSpace& s, const ScalarField& u, double r, int samples) {
  SampleSpec spec;
  spec.count = std::size_t(samples);
  spec.rho_min = spec.rho_max = 1.0;
  spec.seed = 977;
  double sup = 0;
  for (const Point& q : sample_cloud(s, spec)) {
    const Point p = dilate(s, r, q);
    sup = std::max(sup, std::abs(u(p)));
    if (u.has_gradient() && p.z.norm() > 0) sup = std::max(sup, u.x_gradient(p).cwiseAbs().maxCoeff());
  }
  return sup;
}

RellichResult rellich_residual(const DegenerateOperator& op, const ScalarField& u, const RellichField& G,
                               const AnnulusDomain& d, const QuadratureGrid& g) {
  const GrushinSpace& s = op.space();
  d.validate();
  const double mid = sphere_sup(s, u, 0.5 * (d.r_in + d.r_out));
  const double tol = 1e-10 * std::max(1.0, mid);
  for (double r : {d.r_in, d.r_out}) {
    if (r <= 0) continue;
    const double leak = sphere_sup(s, u, r);
    if (leak > tol) {
      std::ostringstream os;
      os << "test function does not vanish on the gauge sphere rho = " << r << " (sup " << leak << ")";
      throw DomainError(os.str());
    }
  }
  const CoefficientField& A = op.coeff();
  const auto est = integrate_many(s, d, g, 4, [&](const Point& p, std::span<double> out) {
    const Jet2 j = jet_at(s, u, p);
    const auto v = rellich_integrands(A, G, j, p);
    for (int c = 0; c < 4; ++c) out[c] = v[std::size_t(c)];
  });
  RellichResult r;
  double err = 0;
  for (int c = 0; c < 4; ++c) {
    r.terms[std::size_t(c)] = est[std::size_t(c)];
    r.sum += est[std::size_t(c)].value;
    r.scale = std::max(r.scale, std::abs(est[std::size_t(c)].value));
    err += est[std::size_t(c)].error;
  }
  r.residual = r.scale > 0 ? std::abs(r.sum) / r.scale : 0.0;
  r.residual_error = r.scale > 0 ? err / r.scale : 0.0;
  return r;
}

}  // namespace grushin
