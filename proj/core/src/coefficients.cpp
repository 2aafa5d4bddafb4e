#include "grushin/coefficients.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace grushin {

Mat CoefficientField::x_derivative(int l, const Point& p) const {
  const int N = space_.N();
  if (l < 0 || l >= N) throw DimensionError("field index out of range");
  const double zn = p.z.norm();
  const double coef = l < space_.m() ? 1.0 : std::pow(zn, space_.gamma());
  const double rho = gauge_and_angle(space_, p).rho;
  const double h = 1e-5 * std::min(std::max(1.0, rho), zn > 0 ? zn : 1.0);
  auto diff = [&](double step) {
    Point pp = p, pm = p;
    pp.coord(l) += step * coef;
    pm.coord(l) -= step * coef;
    return Mat((a(pp) - a(pm)) / (2 * step));
  };
  const Mat c = diff(h), f = diff(h / 2);
  return (4 * f - c) / 3;
}

Mat IdentityCoefficients::a(const Point& p) const {
  check_dims(space_, p);
  return Mat::Identity(space_.N(), space_.N());
}

Mat IdentityCoefficients::x_derivative(int, const Point&) const {
  return Mat::Zero(space_.N(), space_.N());
}

Mat ExampleCoefficients::a(const Point& p) const {
  check_dims(space_, p);
  const int m = space_.m(), k = space_.k(), N = space_.N();
  const double g = space_.gamma();
  const double rho = gauge_and_angle(space_, p).rho;
  const double zp = std::pow(p.z.norm(), g + 1);
  const double z1 = p.z[0];
  const double f = prm_.f0 + prm_.f1 * z1, gg = prm_.g0 + prm_.g1 * z1, h = prm_.h0 + prm_.h1 * z1;
  Mat A = Mat::Zero(N, N);
  for (int i = 0; i < m; ++i) A(i, i) = 1 + rho * f;
  for (int j = 0; j < k; ++j) A(m + j, m + j) = 1 + zp * h;
  for (int i = 0; i < std::min(m, k); ++i) A(i, m + i) = A(m + i, i) = zp * gg;
  return A;
}

Mat ExampleCoefficients::x_derivative(int l, const Point& p) const {
  check_dims(space_, p);
  const int m = space_.m(), k = space_.k(), N = space_.N();
  if (l < 0 || l >= N) throw DimensionError("field index out of range");
  const double g = space_.gamma();
  const GaugeJets J(space_, p);
  const double zn = J.znorm;
  const double zp = std::pow(zn, g + 1);
  const double z1 = p.z[0];
  const double f = prm_.f0 + prm_.f1 * z1, gg = prm_.g0 + prm_.g1 * z1, h = prm_.h0 + prm_.h1 * z1;
  const double e1 = l == 0 ? 1.0 : 0.0;
  // X_l |z|^{γ+1}; zero along the t-fields.
  const double dzp = l < m ? (g + 1) * std::pow(zn, g - 1) * p.z[l] : 0.0;
  Mat D = Mat::Zero(N, N);
  const double d11 = f * J.grad[l] + J.rho * prm_.f1 * e1;
  for (int i = 0; i < m; ++i) D(i, i) = d11;
  for (int j = 0; j < k; ++j) D(m + j, m + j) = dzp * h + zp * prm_.h1 * e1;
  for (int i = 0; i < std::min(m, k); ++i) D(i, m + i) = D(m + i, i) = dzp * gg + zp * prm_.g1 * e1;
  return D;
}

Mat ViolatingCoefficients::a(const Point& p) const {
  check_dims(space_, p);
  Mat A = Mat::Identity(space_.N(), space_.N());
  A(0, 0) += c_ * std::sqrt(gauge_and_angle(space_, p).rho);
  return A;
}

Mat ViolatingCoefficients::x_derivative(int l, const Point& p) const {
  const GaugeJets J(space_, p);
  Mat D = Mat::Zero(space_.N(), space_.N());
  D(0, 0) = 0.5 * c_ * J.grad[l] / std::sqrt(J.rho);
  return D;
}

std::pair<double, double> eigen_range(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

namespace {

void check_ellipticity(const CoefficientField& A, const Mat& a) {
  const auto [lo, hi] = eigen_range(a);
  const double lam = A.lambda();
  if (lo < lam * (1 - 1e-12) || hi > (1 + 1e-12) / lam)
    throw DomainError("ellipticity violated: eigenvalues [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] outside [" + std::to_string(lam) + ", " +
                      std::to_string(1 / lam) + "]");
}

}  // namespace

DerivedQuantities derived_at(const CoefficientField& A, const GrushinSpace& s, const Point& p) {
  check_dims(s, p);
  const GaugeJets J(s, p);
  const Mat a = A.a(p);
  check_ellipticity(A, a);
  DerivedQuantities d;
  const Vec sv = a * J.grad;
  d.mu = J.grad.dot(sv);
  d.sigma = d.mu - J.grad.squaredNorm();
  d.F_coeffs = (J.rho / d.mu) * sv;
  return d;
}

double F_apply(const CoefficientField& A, const GrushinSpace& s, const ScalarField& f,
               const Point& p) {
  const DerivedQuantities d = derived_at(A, s, p);
  return d.F_coeffs.dot(x_gradient(s, f, p));
}

PointGeometry::PointGeometry(const CoefficientField& A, const Point& p)
    : jets(A.space(), p), a(A.a(p)) {
  const int N = A.space().N();
  check_ellipticity(A, a);
  da.reserve(std::size_t(N));
  for (int l = 0; l < N; ++l) da.push_back(A.x_derivative(l, p));
  const Vec& g = jets.grad;
  const Mat& H = jets.hess;
  const Vec sv = a * g;
  mu = g.dot(sv);
  const Mat B = b();
  sigma = g.dot(B * g);
  dmu.resize(N);
  dsigma.resize(N);
  for (int l = 0; l < N; ++l) {
    dmu[l] = g.dot(da[l] * g) + 2 * H.row(l).dot(sv);
    dsigma[l] = g.dot(da[l] * g) + 2 * H.row(l).dot(B * g);
  }
  const double rho = jets.rho;
  c = (rho / mu) * sv;
  const Mat ds = d_contraction(a, da);
  dc.resize(N, N);
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j)
      dc(l, j) = g[l] * sv[j] / mu + rho * ds(l, j) / mu - rho * sv[j] * dmu[l] / (mu * mu);
  divF = dc.trace();
}

Mat PointGeometry::d_contraction(const Mat& M, const std::vector<Mat>& dM) const {
  const int N = int(M.rows());
  Mat out(N, N);
  for (int l = 0; l < N; ++l) {
    const Vec row = dM[std::size_t(l)] * jets.grad + M * jets.hess.row(l).transpose();
    out.row(l) = row.transpose();
  }
  return out;
}

VerificationReport hypothesis_check(const CoefficientField& A, const GrushinSpace& s,
                                    const SampleSpec& spec) {
  const auto cloud = sample_cloud(s, spec);
  const int m = s.m(), N = s.N();
  const double g = s.gamma();
  const char* names[5] = {"b_upper_left", "b_other_blocks", "db_z_upper_left", "db_t_mixed",
                          "db_other"};
  double worst[5] = {0, 0, 0, 0, 0};
  double worst_rho[5] = {0, 0, 0, 0, 0};
  double asym = 0, eig_lo = 1e300, eig_hi = 0;
  std::size_t skipped = 0;
  for (const Point& p : cloud) {
    if (p.z.norm() == 0) {
      ++skipped;
      continue;
    }
    const auto gv = gauge_and_angle(s, p);
    const Mat a = A.a(p);
    asym = std::max(asym, (a - a.transpose()).cwiseAbs().maxCoeff());
    const auto [lo, hi] = eigen_range(a);
    eig_lo = std::min(eig_lo, lo);
    eig_hi = std::max(eig_hi, hi);
    const Mat B = a - Mat::Identity(N, N);
    auto upd = [&](int c, double r) {
      if (r > worst[c]) {
        worst[c] = r;
        worst_rho[c] = gv.rho;
      }
    };
    const double other = std::pow(gv.psi, 0.5 + 0.5 / g) * gv.rho;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (i < m && j < m) upd(0, std::abs(B(i, j)) / gv.rho);
        else upd(1, std::abs(B(i, j)) / other);
      }
    for (int k = 0; k < N; ++k) {
      const Mat D = A.x_derivative(k, p);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double v = std::abs(D(i, j));
          if (k < m && i < m && j < m) upd(2, v);
          else if (k >= m && std::max(i, j) >= m) upd(3, v / std::pow(gv.psi, 1 + 0.5 / g));
          else upd(4, v / std::sqrt(gv.psi));
        }
    }
  }
  VerificationReport rep;
  double lam_min = 0;
  for (int c = 0; c < 5; ++c) {
    lam_min = std::max(lam_min, worst[c]);
    CheckRecord r;
    r.name = std::string("hypothesis.") + names[c];
    r.anchor = anchors::hypothesis;
    r.values = {{"worst_ratio", worst[c]}, {"rho_at_worst", worst_rho[c]}};
    r.verdict = Verdict::diagnostic;
    rep.add(r);
  }
  CheckRecord sym;
  sym.name = "hypothesis.symmetry";
  sym.anchor = anchors::hypothesis;
  sym.values = {{"max_asymmetry", asym}};
  sym.tolerance = 1e-14;
  sym.verdict = asym <= 1e-14 ? Verdict::pass : Verdict::fail;
  rep.add(sym);
  CheckRecord el;
  el.name = "hypothesis.ellipticity";
  el.anchor = anchors::hypothesis;
  el.values = {{"min_eigenvalue", eig_lo}, {"max_eigenvalue", eig_hi}, {"lambda", A.lambda()}};
  el.verdict = (eig_lo >= A.lambda() && eig_hi <= 1 / A.lambda()) ? Verdict::pass : Verdict::fail;
  rep.add(el);
  CheckRecord r;
  r.name = "hypothesis.minimal_Lambda";
  r.anchor = anchors::hypothesis;
  r.values = {{"minimal_Lambda", lam_min}, {"declared_Lambda", A.Lambda()},
              {"samples", cloud.size()}, {"skipped", skipped}};
  r.tolerance = A.Lambda();
  r.verdict = lam_min <= A.Lambda() ? Verdict::pass : Verdict::fail;
  rep.add(r);
  return rep;
}

}  // namespace grushin
