#include "grushin/bounds.hpp"

#include <cmath>
#include <limits>

#include "grushin/parallel.hpp"

namespace grushin {

namespace {

enum Item {
  kDivF, kFmu, kFpsi, kDivSigmaZ, kGradRhoZ, kGradRhoT, kFminusZ, kFA, kCommF, kSigma, kGradSigma,
  kGradSigmaComp, kBField, kPsiZ, kPsiT, kSigmaOverMu, kZSigma, kCommSigmaZ, kCommBField,
  kDbGrad, kDivB, kBHess, kBContraction, kThird, kHessLike, kHessZT, kHessTZ, kCount
};

// Zf from an X-gradient.
double generator_from_gradient(int m, double g, const Point& p, const Vec& xg) {
  const double zg = std::pow(p.z.norm(), g);
  double out = 0;
  for (int i = 0; i < m; ++i) out += p.z[i] * xg[i];
  for (int j = 0; j < p.t.size(); ++j) out += (g + 1) * p.t[j] * xg[m + j] / zg;
  return out;
}

// [X_i, X_j]u from the X-gradient of u.
double bracket(int m, double g, const Point& p, int i, int j, const Vec& xu) {
  const double s2 = p.z.squaredNorm();
  if (i < m && j >= m) return g * p.z[i] / s2 * xu[j];
  if (i >= m && j < m) return -g * p.z[j] / s2 * xu[i];
  return 0;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

const std::vector<BoundItem>& bound_items() {
  using namespace anchors;
  static const std::vector<BoundItem> items = {
      {"div_F", bound_suite},
      {"F_mu", bound_suite},
      {"F_psi", bound_suite},
      {"div_sigma_Z_over_mu", bound_suite},
      {"grad_rho_z", bound_suite, 1.0},
      {"grad_rho_t", bound_suite, 1.0},
      {"F_minus_Z", bound_suite},
      {"F_of_A", bound_suite},
      {"commutator_F", bound_suite},
      {"sigma", bound_suite},
      {"grad_sigma", bound_suite},
      {"grad_sigma_component", bound_suite},
      {"b_field_over_mu", bound_suite},
      {"grad_psi_z", bound_suite},
      {"grad_psi_t", bound_suite},
      {"sigma_over_mu", bound_suite},
      {"Z_sigma", bound_suite},
      {"commutator_sigma_Z", bound_suite},
      {"commutator_b_field", bound_suite},
      {"db_times_grad_rho", bound_suite},
      {"sum_db_grad_rho", bound_suite},
      {"sum_b_hess_rho", bound_suite},
      {"b_contraction", bound_suite},
      {"F_of_b_hess_rho", third_bound},
      {"hess_rho_like_blocks", second_derivative_bounds},
      {"hess_rho_z_outer_t_inner", second_derivative_bounds},
      {"hess_rho_t_outer_z_inner", second_derivative_bounds},
  };
  return items;
}

std::vector<JetFunction> commutator_test_functions(const GrushinSpace& s) {
  const int t = s.k() > 0 ? s.m() : 0;
  std::vector<JetFunction> out;
  out.push_back([s](const Point& p) { return coordinate_jet(s, p, 0); });
  out.push_back([s, t](const Point& p) {
    const Jet2 v = coordinate_jet(s, p, t);
    return t ? v : v * v;
  });
  out.push_back([s, t](const Point& p) {
    const Jet2 z = coordinate_jet(s, p, 0);
    return z * z + coordinate_jet(s, p, t);
  });
  out.push_back([s, t](const Point& p) {
    const Jet2 z = coordinate_jet(s, p, 0), w = coordinate_jet(s, p, t);
    return compose(z, std::sin(z.value), std::cos(z.value), -std::sin(z.value)) *
           compose(w, std::cos(w.value), -std::sin(w.value), -std::cos(w.value));
  });
  out.push_back([s, t](const Point& p) {
    const Jet2 r = rho_jet(GaugeJets(s, p));
    return r * r + coordinate_jet(s, p, 0) * coordinate_jet(s, p, t);
  });
  return out;
}

std::vector<double> bound_ratios(const CoefficientField& A, const Point& p,
                                 const std::vector<JetFunction>& tests) {
  const GrushinSpace& s = A.space();
  const int m = s.m(), N = s.N();
  const double g = s.gamma(), Q = s.Q();
  const PointGeometry G(A, p);
  const GaugeJets& J = G.jets;
  const double rho = J.rho, psi = J.psi, zn = J.znorm, mu = G.mu, sigma = G.sigma;
  const Mat B = G.b();
  const Vec& gr = J.grad;
  const Mat& H = J.hess;
  std::vector<double> r(kCount, 0.0);

  r[kDivF] = std::abs(Q - G.divF) / rho;
  r[kFmu] = std::abs(G.c.dot(G.dmu)) / (rho * psi);
  r[kFpsi] = std::abs(G.c.dot(J.psi_grad)) / (rho * psi);

  // div(wZ) = Zw + Q w for w = σ/μ.
  const Vec dw = (G.dsigma * mu - sigma * G.dmu) / (mu * mu);
  const double w = sigma / mu;
  r[kDivSigmaZ] = std::max(0.0, (generator_from_gradient(m, g, p, dw) + Q * w) / rho);

  for (int i = 0; i < m; ++i)
    r[kGradRhoZ] = std::max(r[kGradRhoZ], std::abs(gr[i]) / std::pow(psi, 1 + 0.5 / g));
  for (int j = m; j < N; ++j)
    r[kGradRhoT] = std::max(r[kGradRhoT], std::abs(gr[j]) / ((g + 1) * std::sqrt(psi)));

  const Vec Zc = generator_coefficients(s, p);
  Vec Fc = G.c;
  for (int j = m; j < N; ++j) Fc[j] *= std::pow(zn, g);
  r[kFminusZ] = (Fc - Zc).norm() / (rho * rho);

  Mat FA = Mat::Zero(N, N);
  for (int l = 0; l < N; ++l) FA += G.c[l] * G.da[std::size_t(l)];
  r[kFA] = FA.operatorNorm() / rho;

  // d_i = (ρ/μ) Σ_j b_ij X_jρ and its X-derivatives.
  const Vec v = B * gr;
  const Mat dv = G.d_contraction(B, G.da);
  Mat dd(N, N);
  for (int l = 0; l < N; ++l)
    for (int i = 0; i < N; ++i)
      dd(l, i) = gr[l] * v[i] / mu + rho * dv(l, i) / mu - rho * v[i] * G.dmu[l] / (mu * mu);
  const Vec d = (rho / mu) * v;

  for (const auto& u : tests) {
    const Jet2 ju = u(p);
    const Vec& xu = ju.grad;
    const double nx = xu.norm();
    if (nx == 0) continue;
    const double zu = generator_from_gradient(m, g, p, xu);
    for (int i = 0; i < N; ++i) {
      double cf = 0, cb = 0;
      for (int j = 0; j < N; ++j) {
        cf += G.dc(i, j) * xu[j] + G.c[j] * bracket(m, g, p, i, j, xu);
        cb += dd(i, j) * xu[j] + d[j] * bracket(m, g, p, i, j, xu);
      }
      r[kCommF] = std::max(r[kCommF], std::abs(cf - xu[i]) / (rho * nx));
      const double cs = -dw[i] * zu - w * xu[i];
      r[kCommSigmaZ] = std::max(r[kCommSigmaZ], std::abs(cs) / (rho * nx));
      r[kCommBField] = std::max(r[kCommBField], std::abs(cb) / (rho * nx));
    }
  }

  r[kSigma] = std::abs(sigma) / (rho * std::pow(psi, 1.5 + 0.5 / g));
  r[kGradSigma] = G.dsigma.norm() / std::pow(psi, 1.5);
  r[kGradSigmaComp] = max_abs(G.dsigma) / std::pow(psi, 1.5);
  r[kBField] = v.norm() / mu / zn;
  for (int i = 0; i < m; ++i)
    r[kPsiZ] = std::max(r[kPsiZ], std::abs(J.psi_grad[i]) / (g * psi / zn));
  for (int j = m; j < N; ++j)
    r[kPsiT] = std::max(r[kPsiT], std::abs(J.psi_grad[j]) / (g * psi / rho));
  r[kSigmaOverMu] = std::abs(w) / (rho * psi);
  r[kZSigma] = std::abs(generator_from_gradient(m, g, p, G.dsigma)) / (rho * psi);

  double sum_div = 0, sum_hess = 0;
  for (int l = 0; l < N; ++l) {
    const Vec col = G.da[std::size_t(l)].transpose() * gr;  // Σ_i X_l b_ij X_iρ, indexed by j
    r[kDbGrad] = std::max(r[kDbGrad], max_abs(col) / psi);
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      sum_div += std::abs(G.da[std::size_t(i)](i, j) * gr[j]);
      sum_hess += std::abs(B(i, j) * H(i, j));
    }
  r[kDivB] = sum_div / mu;
  r[kBHess] = sum_hess / mu;
  r[kBContraction] = max_abs(v) / (rho * std::pow(mu, 1 + 0.5 / g));

  double Fbh = 0;
  for (int l = 0; l < N; ++l) {
    double xl = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        xl += G.da[std::size_t(l)](i, j) * H(i, j) + (B(i, j) != 0 ? B(i, j) * J.third(l, i, j) : 0.0);
    Fbh += G.c[l] * xl;
  }
  r[kThird] = std::abs(Fbh) / psi;

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double h = std::abs(H(i, j)) * rho;
      if ((i < m) == (j < m)) r[kHessLike] = std::max(r[kHessLike], h / mu);
      else if (i < m) r[kHessZT] = std::max(r[kHessZT], h / std::pow(mu, 0.5 - 0.5 / g));
      else r[kHessTZ] = std::max(r[kHessTZ], h / std::pow(mu, 1.5 + 0.5 / g));
    }
  return r;
}

VerificationReport structural_bound_suite(const CoefficientField& A, const BoundSuiteOptions& opt) {
  const GrushinSpace& s = A.space();
  const auto cloud = sample_cloud(s, opt.samples);
  const auto tests = commutator_test_functions(s);
  const auto& items = bound_items();
  const std::size_t n = cloud.size(), half = n / 2;
  std::vector<std::vector<double>> ratios(n);
  std::vector<char> skipped(n, 0);
  std::vector<double> fr_err(n, 0.0), mu_lo(n, 0.0), mu_hi(n, 0.0);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    try {
      ratios[i] = bound_ratios(A, cloud[i], tests);
      const DerivedQuantities dq = derived_at(A, s, cloud[i]);
      const GaugeJets J(s, cloud[i]);
      fr_err[i] = std::abs(dq.F_coeffs.dot(J.grad) - J.rho) / J.rho;
      mu_lo[i] = dq.mu / J.psi;
      mu_hi[i] = dq.mu / J.psi;
    } catch (const DomainError&) {
      skipped[i] = 1;
    }
  });

  VerificationReport rep;
  Table tab;
  tab.columns = {"item", "sup_half_cloud", "sup_full_cloud", "relative_growth"};
  std::size_t nskip = 0;
  for (char c : skipped) nskip += std::size_t(c);
  for (std::size_t it = 0; it < items.size(); ++it) {
    double sup_half = 0, sup_full = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (skipped[i]) continue;
      const double v = ratios[i][it];
      if (!std::isfinite(v)) finite = false;
      sup_full = std::max(sup_full, v);
      if (i < half) sup_half = std::max(sup_half, v);
    }
    const double growth = sup_half > 0 ? (sup_full - sup_half) / sup_half : (sup_full > 0 ? 1.0 : 0.0);
    CheckRecord r;
    r.name = "bounds." + items[it].name;
    r.anchor = items[it].anchor;
    r.values = {{"sup_ratio_half", sup_half}, {"sup_ratio_full", sup_full}, {"relative_growth", growth},
                {"points_half", half}, {"points_full", n}, {"skipped", nskip}};
    r.tolerance = opt.growth_tolerance;
    bool ok = finite && growth <= opt.growth_tolerance;
    if (items[it].ceiling > 0) {
      ok = ok && sup_full <= items[it].ceiling * (1 + 1e-12);
      r.values["ceiling"] = items[it].ceiling;
    }
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    rep.add(r);
    tab.add_row({double(it), sup_half, sup_full, growth});
  }
  rep.tables["bound_suite"] = tab;

  double worst_fr = 0, lo = 1e300, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (skipped[i]) continue;
    worst_fr = std::max(worst_fr, fr_err[i]);
    lo = std::min(lo, mu_lo[i]);
    hi = std::max(hi, mu_hi[i]);
  }
  CheckRecord fr;
  fr.name = "bounds.F_rho_equals_rho";
  fr.anchor = anchors::f_on_gauge;
  fr.values = {{"max_relative_error", worst_fr}};
  fr.tolerance = 1e-10;
  fr.verdict = worst_fr <= 1e-10 ? Verdict::pass : Verdict::fail;
  rep.add(fr);
  CheckRecord mb;
  mb.name = "bounds.mu_between_lambda_psi";
  mb.anchor = anchors::mu_bounds;
  mb.values = {{"min_mu_over_psi", lo}, {"max_mu_over_psi", hi}, {"lambda", A.lambda()}};
  mb.verdict = (lo >= A.lambda() * (1 - 1e-12) && hi <= (1 + 1e-12) / A.lambda()) ? Verdict::pass
                                                                                  : Verdict::fail;
  rep.add(mb);

  // Finite-difference cross-check of the analytic divergence and commutators where FD is reliable.
  double worst_div = 0, worst_comm = 0;
  std::size_t used = 0;
  FdOptions fo;
  fo.local_scale = true;
  for (std::size_t i = 0; i < n && used < opt.fd_crosscheck_points; ++i) {
    const Point& p = cloud[i];
    if (skipped[i] || p.z.norm() < 0.05) continue;
    ++used;
    const PointGeometry G(A, p);
    double div_fd = 0;
    for (int l = 0; l < s.N(); ++l) {
      const ScalarField cl([&A, l](const Point& q) { return PointGeometry(A, q).c[l]; });
      div_fd += fd_oracle(s, cl, p, {l}, fo).value;
    }
    worst_div = std::max(worst_div, std::abs(div_fd - G.divF) / (1 + std::abs(G.divF)));
    const VectorField F = [&A, &s](const Point& q) {
      Vec c = PointGeometry(A, q).c;
      for (int j = s.m(); j < s.N(); ++j) c[j] *= std::pow(q.z.norm(), s.gamma());
      return c;
    };
    const JetFunction& u = tests[3];
    const ScalarField uf([&u](const Point& q) { return u(q).value; });
    const Vec xu = u(p).grad;
    for (int a = 0; a < s.N(); ++a) {
      const VectorField Xa = x_field(s, a);
      const VectorField f1[] = {Xa, F}, f2[] = {F, Xa};
      const double fd = fd_along(s, uf, p, f1, fo).value - fd_along(s, uf, p, f2, fo).value;
      double an = 0;
      for (int j = 0; j < s.N(); ++j) an += G.dc(a, j) * xu[j] + G.c[j] * bracket(s.m(), s.gamma(), p, a, j, xu);
      worst_comm = std::max(worst_comm, std::abs(fd - an) / (1 + std::abs(an)));
    }
  }
  CheckRecord fd;
  fd.name = "bounds.fd_crosscheck";
  fd.anchor = anchors::bound_suite;
  fd.values = {{"points", used}, {"max_div_F_discrepancy", worst_div},
               {"max_commutator_discrepancy", worst_comm}};
  fd.tolerance = 1e-5;
  fd.verdict = (worst_div <= 1e-5 && worst_comm <= 1e-5) ? Verdict::pass : Verdict::fail;
  rep.add(fd);
  return rep;
}

}  // namespace grushin
