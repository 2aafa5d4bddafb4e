#include "grushin/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "grushin/parallel.hpp"
#include "grushin/sampling.hpp"
#include "grushin/test_functions.hpp"

namespace grushin {

namespace {

std::string space_tag(const GrushinSpace& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "gamma%g_m%d_k%d", s.gamma(), s.m(), s.k());
  return buf;
}

// Worst |a − b| / allowed over a category; ≤ 1 passes. b is the reference value.
struct Worst {
  double excess = 0;
  double rel = 0;  // over nonzero references only
  std::size_t count = 0;

  void add(double a, double b, double allowed) {
    excess = std::max(excess, std::abs(a - b) / allowed);
    if (b != 0) rel = std::max(rel, std::abs(a - b) / std::abs(b));
    ++count;
  }
  void merge(const Worst& o) {
    excess = std::max(excess, o.excess);
    rel = std::max(rel, o.rel);
    count += o.count;
  }
};

CheckRecord worst_record(const std::string& name, const char* anchor, const Worst& w, double tol) {
  CheckRecord r;
  r.name = name;
  r.anchor = anchor;
  r.values = {{"comparisons", w.count}, {"max_error_over_allowed", w.excess}, {"max_relative_error", w.rel}};
  r.tolerance = tol;
  r.verdict = w.count > 0 && w.excess <= 1 ? Verdict::pass : Verdict::fail;
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

VerificationReport derivative_ladder(const GrushinSpace& s, const LadderOptions& opt) {
  const int N = s.N();
  SampleSpec spec;
  spec.count = opt.points;
  spec.rho_min = 0.2;
  spec.rho_max = 5;
  spec.psi_min = 1e-4;
  spec.min_znorm = 0.1;
  spec.seed = opt.seed;
  const auto cloud = sample_cloud(s, spec);
  const ScalarField rho = rho_field(s), psi = psi_field(s);
  // 0: X ρ, 1: X X ρ, 2: X X X ρ, 3: X ψ
  std::vector<std::array<Worst, 4>> per(cloud.size());
  parallel_for(cloud.size(), opt.threads, [&](std::size_t i) {
    const Point& p = cloud[i];
    const GaugeJets J(s, p);
    auto& w = per[i];
    auto cmp = [&](Worst& into, double cf, const FdEstimate& fd, double scale) {
      into.add(fd.value, cf, std::max(opt.rel_tol * std::max(std::abs(cf), scale), fd.error));
    };
    for (int a = 0; a < N; ++a) {
      cmp(w[0], J.grad[a], fd_oracle(s, rho, p, {a}), 1e-3);
      cmp(w[3], J.psi_grad[a], fd_oracle(s, psi, p, {a}), 1e-3 / J.rho);
      for (int b = 0; b < N; ++b) {
        cmp(w[1], J.hess(a, b), fd_oracle(s, rho, p, {a, b}), 1e-3 / J.rho);
        for (int c = 0; c < N; ++c)
          cmp(w[2], J.third(a, b, c), fd_oracle(s, rho, p, {a, b, c}), 1e-3 / (J.rho * J.rho));
      }
    }
  });
  std::array<Worst, 4> tot;
  for (const auto& w : per)
    for (int c = 0; c < 4; ++c) tot[std::size_t(c)].merge(w[std::size_t(c)]);
  const std::string tag = space_tag(s);
  VerificationReport rep;
  rep.add(worst_record("ladder.first." + tag, anchors::first_derivatives, tot[0], opt.rel_tol));
  rep.add(worst_record("ladder.second." + tag, anchors::second_derivatives, tot[1], opt.rel_tol));
  rep.add(worst_record("ladder.third." + tag, anchors::third_derivatives, tot[2], opt.rel_tol));
  rep.add(worst_record("ladder.angle." + tag, anchors::psi_derivatives, tot[3], opt.rel_tol));
  return rep;
}

VerificationReport exact_identities(const CoefficientField& A, const IdentityOptions& opt) {
  const GrushinSpace& s = A.space();
  const int m = s.m(), k = s.k();
  const double g = s.gamma(), Q = s.Q();
  const IdentityCoefficients I(s);
  SampleSpec spec;
  spec.count = opt.points;
  spec.rho_min = 0.05;
  spec.rho_max = 1;  // the example family is elliptic on B_1
  spec.psi_min = 1e-2;
  spec.seed = opt.seed;
  const ScalarField rho = rho_field(s);
  // sin(z_1) e^{t_1} + z_1² t_1 with analytic jets.
  const ScalarField v = field_from_jets([s](const Point& p) {
    const Jet2 z1 = coordinate_jet(s, p, 0), t1 = coordinate_jet(s, p, s.m());
    const Jet2 sz = compose(z1, std::sin(z1.value), std::cos(z1.value), -std::sin(z1.value));
    return sz * exp(t1) + z1 * z1 * t1;
  });
  const RadialProfile profile{[](double r) { return std::exp(-r * r); },
                              [](double r) { return -2 * r * std::exp(-r * r); },
                              [](double r) { return (4 * r * r - 2) * std::exp(-r * r); }};
  Worst zr, zpsi, grad, frho, fz, radial, fund;
  for (const Point& p : sample_cloud(s, spec)) {
    const GaugeJets J(s, p);
    const double r = J.rho, psi = J.psi;
    const double tol = opt.rel_tol;
    zr.add(generator_apply(s, rho, p), r, tol * r);
    // Zψ term by term, so the relative scale is the sum of absolute terms.
    double zp = 0, zscale = 0;
    const double zg = std::pow(J.znorm, g);
    for (int i = 0; i < m; ++i) {
      zp += p.z[i] * J.psi_grad[i];
      zscale += std::abs(p.z[i] * J.psi_grad[i]);
    }
    for (int j = 0; j < k; ++j) {
      const double term = (g + 1) * p.t[j] * J.psi_grad[m + j] / zg;
      zp += term;
      zscale += std::abs(term);
    }
    zpsi.add(zp, 0.0, tol * std::max(zscale, 1e-300));
    grad.add(J.grad.squaredNorm(), psi, tol * psi);
    frho.add(F_apply(A, s, rho, p), r, tol * r);
    // |Zv| ≤ ρ|Xv|/√ψ sets the scale.
    const double zv = generator_apply(s, v, p);
    fz.add(F_apply(I, s, v, p), zv, tol * r * v.x_gradient(p).norm() / std::sqrt(psi));
    const Jet2 rj = rho_jet(J);
    const double f1 = profile.df(r), f2 = profile.d2f(r);
    const double rs = psi * (std::abs(f2) + (Q - 1) * std::abs(f1) / r);
    radial.add(apply_L(I, compose(rj, profile.f(r), f1, f2), p), psi * (f2 + (Q - 1) * f1 / r), tol * rs);
    const double e1 = (2 - Q) * std::pow(r, 1 - Q), e2 = (2 - Q) * (1 - Q) * std::pow(r, -Q);
    fund.add(apply_L(I, pow(rj, 2 - Q), p), 0.0, tol * psi * (std::abs(e2) + (Q - 1) * std::abs(e1) / r));
  }
  const std::string tag = space_tag(s);
  VerificationReport rep;
  rep.add(worst_record("identity.Z_rho." + tag, anchors::generator, zr, opt.rel_tol));
  rep.add(worst_record("identity.Z_psi." + tag, anchors::generator, zpsi, opt.rel_tol));
  rep.add(worst_record("identity.grad_rho_norm." + tag, anchors::gradient_norm, grad, opt.rel_tol));
  rep.add(worst_record("identity.F_rho." + tag + "." + A.name(), anchors::f_on_gauge, frho, opt.rel_tol));
  rep.add(worst_record("identity.F_equals_Z." + tag, anchors::f_equals_z, fz, opt.rel_tol));
  rep.add(worst_record("identity.radial." + tag, anchors::radial_identity, radial, opt.rel_tol));
  rep.add(worst_record("identity.fundamental." + tag, anchors::fundamental_solution, fund, opt.rel_tol));
  return rep;
}

VerificationReport rellich_suite(const std::vector<CoefficientPtr>& families, const RellichOptions& opt) {
  if (families.empty()) throw DomainError("Rellich suite needs at least one coefficient family");
  if (opt.grids.size() < 2) throw DomainError("Rellich suite needs at least two grids");
  struct Job {
    CoefficientPtr A;
    TestFunction u;
    bool log_factor;
  };
  std::vector<Job> jobs;
  for (const auto& A : families) {
    const GrushinSpace& s = A->space();
    for (const auto& u : {radial_bump(s, 0.3, 0.8, 4), angular_bump(s, 0.3, 0.8, 4, 0.6),
                          tensor_bump(s, 0.2, 0.6, -0.1, 0.15, 0.1, 4)})
      for (bool lg : {false, true}) jobs.push_back({A, u, lg});
  }
  std::vector<std::vector<RellichResult>> res(jobs.size());
  parallel_for(jobs.size(), opt.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    const DegenerateOperator op(j.A);
    for (int n : opt.grids) {
      QuadratureGrid g;
      g.n_z = n;
      res[i].push_back(rellich_residual(op, j.u.field(), {2 - j.A->space().Q(), j.log_factor}, opt.domain, g));
    }
  });
  VerificationReport rep;
  Table t{{"family", "function", "log_factor", "n_z", "residual", "residual_error", "scale"}, {}};
  std::vector<double> ns(opt.grids.begin(), opt.grids.end());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    std::vector<double> r;
    for (std::size_t l = 0; l < res[i].size(); ++l) {
      r.push_back(res[i][l].residual);
      t.add_row({double(std::find(families.begin(), families.end(), j.A) - families.begin()), double(i / 2 % 3),
                 double(j.log_factor), ns[l], res[i][l].residual, res[i][l].residual_error, res[i][l].scale});
    }
    const double order = -loglog_slope(ns, r);
    CheckRecord c;
    c.name = "rellich." + j.A->name() + "." + j.u.name + (j.log_factor ? ".log" : "");
    c.anchor = anchors::rellich;
    c.values = {{"grids", opt.grids}, {"residual", r}, {"order", order}, {"final", r.back()},
                {"scale", res[i].back().scale}};
    c.tolerance = opt.max_final;
    c.verdict = order >= opt.min_order && r.back() <= opt.max_final ? Verdict::pass : Verdict::fail;
    rep.add(c);
  }
  rep.tables["rellich"] = std::move(t);
  return rep;
}

VerificationReport psi_mass_scaling(const GrushinSpace& s, const ScalingOptions& opt) {
  if (opt.radii.size() < 2) throw DomainError("scaling fit needs at least two radii");
  std::vector<double> v, err;
  const ScalarField one = ScalarField::constant(1.0);
  for (double r : opt.radii) {
    const auto e = vanishing_profile_integral(s, one, r, opt.grid);
    v.push_back(e.value);
    err.push_back(e.error);
  }
  const double slope = loglog_slope(opt.radii, v);
  VerificationReport rep;
  CheckRecord c;
  c.name = "scaling.psi_mass." + space_tag(s);
  c.anchor = anchors::quadrature_scaling;
  c.values = {{"radii", opt.radii}, {"integral", v}, {"error", err}, {"exponent", slope}, {"Q", s.Q()}};
  c.tolerance = opt.tolerance;
  c.verdict = std::abs(slope - s.Q()) <= opt.tolerance ? Verdict::pass : Verdict::fail;
  rep.add(c);
  // ∫_{B_1}ψ is the archived constant.
  const std::size_t unit = std::size_t(std::find(opt.radii.begin(), opt.radii.end(), 1.0) - opt.radii.begin());
  if (unit < v.size())
    rep.regression["scaling." + space_tag(s) + ".psi_mass_unit_ball"] = {v[unit], std::max(1e-6, 2 * err[unit] / v[unit])};
  return rep;
}

}  // namespace grushin
