#include "grushin/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grushin/parallel.hpp"

namespace grushin {

const char* to_string(CarlemanKind k) {
  switch (k) {
    case CarlemanKind::est1: return "est1";
    case CarlemanKind::df: return "df";
    case CarlemanKind::f10: return "f10";
    case CarlemanKind::har1: return "har1";
  }
  return "est1";
}

CarlemanKind carleman_kind_from_string(const std::string& s) {
  for (CarlemanKind k : {CarlemanKind::est1, CarlemanKind::df, CarlemanKind::f10, CarlemanKind::har1})
    if (s == to_string(k)) return k;
  throw DomainError("unknown Carleman estimate '" + s + "'");
}

const char* carleman_anchor(CarlemanKind k) {
  switch (k) {
    case CarlemanKind::est1: return anchors::carleman_est1;
    case CarlemanKind::df: return anchors::carleman_df;
    case CarlemanKind::f10: return anchors::carleman_f10;
    case CarlemanKind::har1: return anchors::carleman_har1;
  }
  return anchors::carleman_est1;
}

namespace {

struct Neumaier {
  double s = 0, c = 0;
  void add(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

bool uses_alpha(CarlemanKind k) { return k != CarlemanKind::har1; }

// Log of the right-hand weight at ρ; ρ^{-2α}e^{2αρ^ε} or ρ^{4−Q}e^{β(log ρ)²}.
double log_rhs_weight(CarlemanKind k, double p, double eps, double Q, double rho) {
  const double lr = std::log(rho);
  if (uses_alpha(k)) return -2 * p * lr + 2 * p * std::pow(rho, eps);
  return (4 - Q) * lr + p * lr * lr;
}

double rhs_weight_slope(CarlemanKind k, double p, double eps, double Q, double rho) {
  if (uses_alpha(k)) return -2 * p / rho + 2 * p * eps * std::pow(rho, eps - 1);
  return ((4 - Q) + 2 * p * std::log(rho)) / rho;
}

struct Slot {
  CarlemanKind kind;
  double p;
  double log_scale;
  double beta_sub;  // substitution exponent for α-kinds
};

enum { kZero, kGrad, kQ, kRhs, kRhsSub, kGradSub, kTerms };

// Expanded product rule for 𝓛(ŵ v), ŵ = (ρ/r)^β e^{−α(ρ^ε − r^ε)}, written term by term.
double expanded_L(const Mat& a, const std::vector<Mat>& da, const GaugeJets& gj, const Jet2& v, double what,
                  double alpha, double beta, double eps, double Q, double mu) {
  const int N = int(a.rows());
  const double rho = gj.rho;
  const double re = std::pow(rho, eps);
  const double h1 = beta - alpha * eps * re;
  const double h2 = beta * (beta - 1) - alpha * eps * re * (2 * beta + eps - 1) + alpha * alpha * eps * eps * re * re;
  const double hq = alpha * alpha * eps * eps * re * re + beta * (beta + Q - 2) - alpha * eps * (2 * beta + eps + Q - 2) * re;
  const Vec& g = gj.grad;
  const double psi = g.squaredNorm();
  const Vec sv = a * g;
  const double Fv = (rho / mu) * sv.dot(v.grad);
  double db = 0, bh = 0, bgg = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double bij = a(i, j) - (i == j ? 1.0 : 0.0);
      db += da[std::size_t(i)](i, j) * g[j];
      bh += bij * gj.hess(i, j);
      bgg += bij * g[i] * g[j];
    }
  const double r2 = 1 / (rho * rho);
  return what * (apply_L(a, da, v) + 2 * mu * Fv * r2 * h1 + r2 * hq * psi * v.value + db * h1 / rho * v.value +
                 bh * h1 / rho * v.value + bgg * r2 * h2 * v.value);
}

}  // namespace

std::vector<CarlemanSides> evaluate_function(const DegenerateOperator& op, const TestFunction& u,
                                             const std::vector<CarlemanKind>& kinds,
                                             const std::vector<double>& parameters, const CarlemanSettings& st) {
  const GrushinSpace& s = op.space();
  const CoefficientField& A = op.coeff();
  const double Q = s.Q(), eps = st.epsilon;
  if (!(eps > 0 && eps < 1)) throw DomainError("epsilon must lie in (0, 1)");
  if (!u.jet) throw DomainError("test function without jets");
  const AnnulusDomain dom = u.support;
  dom.validate();
  if (!(dom.r_in > 0)) throw DomainError("test function " + u.name + " touches the origin");
  if (dom.r_out > st.R * (1 + 1e-12)) throw DomainError("test function " + u.name + " leaves B_R");
  for (double p : parameters)
    if (!(p > 0)) throw DomainError("Carleman parameters must be positive");

  std::vector<Slot> slots;
  double slope = 0;
  for (CarlemanKind k : kinds)
    for (double p : parameters) {
      slots.push_back({k, p, log_rhs_weight(k, p, eps, Q, dom.r_in), (2 * p + 4 - Q) / 2});
      slope = std::max(slope, std::abs(rhs_weight_slope(k, p, eps, Q, dom.r_in)));
    }
  PolarGrid grid = st.grid;
  grid.grading_slope = std::max(grid.grading_slope, slope);

  const bool sub = st.substitution_check;
  const PotentialSpec& V = st.df_potential;
  const PotentialSpec& fq = st.sublinearity;
  const bool need_V = std::find(kinds.begin(), kinds.end(), CarlemanKind::df) != kinds.end() && V.has_potential();

  auto run = [&](const PolarGrid& g) {
    std::vector<Neumaier> acc(slots.size() * kTerms);
    std::size_t bad = 0;
    auto visit = [&](const PolarNode& nd) {
      const Jet2 uj = u.jet(nd.p);
      if (uj.value == 0 && uj.grad.isZero(0) && uj.hess.isZero(0)) return;
      const Point& p = nd.p;
      const GaugeJets gj(s, p);
      const Mat a = A.a(p);
      std::vector<Mat> da;
      da.reserve(std::size_t(s.N()));
      for (int l = 0; l < s.N(); ++l) da.push_back(A.x_derivative(l, p));
      const double mu = gj.grad.dot(a * gj.grad);
      const double axx = uj.grad.dot(a * uj.grad);
      const double Lu = apply_L(a, da, uj);
      if (!std::isfinite(Lu) || !std::isfinite(axx) || !(mu > 0)) {
        ++bad;
        return;
      }
      const double Vu = need_V ? V.V(s, p).value * uj.value : 0.0;
      const double fu = fq.f(uj.value) * nd.psi;
      const double uq = std::pow(std::abs(uj.value), fq.q);
      const double lr = std::log(nd.rho), re = std::pow(nd.rho, eps);
      const Jet2 lrho = log(rho_jet(gj));
      const Jet2 rho_e = pow(rho_jet(gj), eps);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& sl = slots[i];
        Neumaier* out = &acc[i * kTerms];
        const double w = nd.weight;
        if (uses_alpha(sl.kind)) {
          const double al = sl.p;
          const double base = -2 * al * lr + 2 * al * re - sl.log_scale;
          out[kZero].add(w * al * al * al * std::exp(base + (eps - 4) * lr) * uj.value * uj.value * mu);
          out[kGrad].add(w * al * std::exp(base + (eps - 2) * lr) * axx);
          double extra = 0;
          if (sl.kind == CarlemanKind::df) extra = Vu;
          if (sl.kind == CarlemanKind::f10) {
            extra = fu;
            out[kQ].add(w * al * al * al * std::exp(base - 2 * lr) * uq * mu);
          }
          const double wr = std::exp(base) / mu;
          out[kRhs].add(w * wr * (Lu + extra) * (Lu + extra));
          if (sub) {
            // log ŵ = β log(ρ/r) − α(ρ^ε − r^ε); v = u/ŵ carries its own jets.
            const double b = sl.beta_sub;
            const double r0 = dom.r_in;
            const Jet2 lw = (-b * std::log(r0) + al * std::pow(r0, eps)) + ((b * lrho) + (-al) * rho_e);
            const double what = std::exp(lw.value);
            const Jet2 v = uj * exp((-1.0) * lw);
            const double Ls = expanded_L(a, da, gj, v, what, al, b, eps, Q, mu);
            out[kRhsSub].add(w * wr * (Ls + extra) * (Ls + extra));
            // Xu = ŵ(Xv + v X log ŵ)
            const Vec xu = what * (v.grad + v.value * lw.grad);
            out[kGradSub].add(w * al * std::exp(base + (eps - 2) * lr) * xu.dot(a * xu));
          }
        } else {
          const double be = sl.p;
          const double base = be * lr * lr - sl.log_scale;
          out[kZero].add(w * be * be * be * std::exp(base - Q * lr) * uj.value * uj.value * mu);
          out[kGrad].add(w * be * std::exp(base + (2 - Q) * lr) * axx);
          out[kRhs].add(w * std::exp(base + (4 - Q) * lr) * Lu * Lu / mu);
        }
      }
    };
    if (u.box)
      for_each_box_node(s, *u.box, g, visit);
    else
      for_each_polar_node(s, dom, g, visit);
    if (bad) {
      std::ostringstream os;
      os << "non-finite operator samples for " << u.name << " (" << bad << " nodes)";
      throw DomainError(os.str());
    }
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
    return out;
  };

  const std::vector<double> fine = run(grid);
  const std::vector<double> coarse = run(grid.coarsened());

  std::vector<CarlemanSides> res;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& sl = slots[i];
    const double* f = &fine[i * kTerms];
    const double* c = &coarse[i * kTerms];
    CarlemanSides r;
    r.which = sl.kind;
    r.parameter = sl.p;
    r.function = u.name;
    r.log_scale = sl.log_scale;
    r.lhs_zero = f[kZero];
    r.lhs_grad = f[kGrad];
    r.lhs_q = f[kQ];
    r.rhs = f[kRhs];
    r.err_zero = std::abs(f[kZero] - c[kZero]);
    r.err_grad = std::abs(f[kGrad] - c[kGrad]);
    r.err_q = std::abs(f[kQ] - c[kQ]);
    r.err_rhs = std::abs(f[kRhs] - c[kRhs]);
    if (r.lhs_zero < 0 || r.lhs_grad < 0 || r.lhs_q < 0 || r.rhs < 0)
      throw Error("negative Carleman term for " + u.name);
    const double L = r.lhs();
    if (L == 0 && r.rhs == 0) {
      r.degenerate = true;
    } else if (r.rhs == 0) {
      throw DomainError("Carleman right-hand side vanishes for " + u.name);
    } else {
      r.ratio = L / r.rhs;
      r.ratio_error = r.ratio * ((r.err_zero + r.err_grad + r.err_q) / std::max(L, 1e-300) + r.err_rhs / r.rhs);
    }
    if (sub && uses_alpha(sl.kind) && !r.degenerate) {
      r.rhs_substituted = f[kRhsSub];
      const double g1 = std::abs(r.rhs - f[kRhsSub]) / r.rhs;
      const double g2 = r.lhs_grad > 0 ? std::abs(r.lhs_grad - f[kGradSub]) / r.lhs_grad : 0.0;
      r.substitution_gap = std::max(g1, g2);
    } else {
      r.rhs_substituted = r.rhs;
    }
    res.push_back(r);
  }
  return res;
}

CarlemanSides evaluate_sides(const CarlemanCase& c, const DegenerateOperator& op, const TestFunction& u,
                             const PolarGrid& grid) {
  CarlemanSettings st;
  st.grid = grid;
  st.epsilon = c.epsilon;
  st.R = c.R;
  if (c.which == CarlemanKind::df) st.df_potential = c.potential;
  if (c.which == CarlemanKind::f10) st.sublinearity = c.potential;
  if (c.which == CarlemanKind::df && c.potential.kind == PotentialSpec::Kind::sublinear)
    throw DomainError("the c1-potential estimate needs a potential, not a sublinearity");
  if (c.which == CarlemanKind::f10 && c.potential.kind != PotentialSpec::Kind::sublinear &&
      c.potential.kind != PotentialSpec::Kind::none)
    throw DomainError("the sublinear estimate needs a sublinearity");
  return evaluate_function(op, u, {c.which}, {c.parameter}, st).front();
}

SweepSummary summarize_sweep(const std::vector<CarlemanSides>& ev) {
  SweepSummary s;
  std::vector<CarlemanSides> sorted = ev;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.parameter < b.parameter; });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  s.degenerate = !sorted.empty();
  for (const auto& e : sorted) {
    s.parameters.push_back(e.parameter);
    s.ratios.push_back(e.ratio);
    s.degenerate = s.degenerate && e.degenerate;
    if (e.degenerate || e.ratio <= 0) continue;
    const double x = std::log(e.parameter), y = -std::log(e.ratio);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].ratio <= 0) continue;
    const double doublings = std::log2(sorted[i].parameter / sorted[i - 1].parameter);
    const double g = std::pow(sorted[i].ratio / sorted[i - 1].ratio, 1 / doublings) - 1;
    s.max_growth = std::max(s.max_growth, g);
  }
  if (n >= 2) s.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  s.bounded = !s.degenerate && s.max_growth <= 0.10;
  return s;
}

double constant_estimate(const std::vector<CarlemanSides>& ev) {
  double m = 0;
  for (const auto& e : ev) m = std::max(m, e.ratio);
  return 1.2 * m;
}

CarlemanSuiteResult carleman_suite(const DegenerateOperator& op, const std::vector<TestFunction>& suite,
                                   const CarlemanSuiteOptions& opt) {
  CarlemanSuiteResult out;
  std::vector<std::vector<CarlemanSides>> per(suite.size());
  CarlemanSettings st = opt.settings;
  const int threads = st.threads;
  st.threads = 1;
  parallel_for(suite.size(), threads, [&](std::size_t i) {
    try {
      per[i] = evaluate_function(op, suite[i], opt.kinds, opt.parameters, st);
    } catch (const DomainError& e) {
      throw DomainError("suite member " + std::to_string(i) + " (" + suite[i].name + "): " + e.what());
    }
  });
  for (const auto& v : per) out.evaluations.insert(out.evaluations.end(), v.begin(), v.end());

  Table tab;
  tab.columns = {"estimate", "parameter", "function", "lhs_alpha3_term", "lhs_alpha_term", "lhs_q_term", "rhs", "ratio", "ratio_error",
                 "substitution_gap"};
  for (std::size_t fi = 0; fi < per.size(); ++fi)
    for (const auto& e : per[fi])
      tab.add_row({double(int(e.which)), e.parameter, double(fi), e.lhs_zero, e.lhs_grad, e.lhs_q, e.rhs, e.ratio,
                   e.ratio_error, e.substitution_gap});
  out.report.tables["carleman"] = tab;

  double worst_gap = 0, worst_gap_allow = 0;
  std::string worst_gap_at;
  bool gap_ok = true;
  for (CarlemanKind k : opt.kinds) {
    const std::string name = to_string(k);
    std::vector<CarlemanSides> mine;
    double max_growth = 0, max_ratio = 0, worst_slope = 0, max_growth_noq = 0;
    std::string growth_at, ratio_at;
    bool all_bounded = true;
    int degenerate = 0;
    for (std::size_t fi = 0; fi < per.size(); ++fi) {
      std::vector<CarlemanSides> sw;
      for (const auto& e : per[fi])
        if (e.which == k) sw.push_back(e);
      mine.insert(mine.end(), sw.begin(), sw.end());
      const SweepSummary sm = summarize_sweep(sw);
      if (k == CarlemanKind::f10) {
        std::vector<CarlemanSides> noq = sw;
        for (auto& e : noq) e.ratio = e.degenerate ? 0.0 : (e.lhs_zero + e.lhs_grad) / e.rhs;
        max_growth_noq = std::max(max_growth_noq, summarize_sweep(noq).max_growth);
      }
      if (sm.degenerate) {
        ++degenerate;
        continue;
      }
      if (sm.max_growth > max_growth) max_growth = sm.max_growth, growth_at = suite[fi].name;
      worst_slope = std::min(worst_slope, sm.slope);
      all_bounded = all_bounded && sm.max_growth <= opt.growth_tolerance;
      for (const auto& e : sw) {
        if (e.ratio > max_ratio) max_ratio = e.ratio, ratio_at = suite[fi].name;
        if (uses_alpha(k) && opt.settings.substitution_check) {
          const double allow = opt.substitution_tolerance + 2 * e.err_rhs / e.rhs + 2 * e.err_grad / std::max(e.lhs_grad, 1e-300);
          if (e.substitution_gap > allow) gap_ok = false;
          if (e.substitution_gap > worst_gap) worst_gap = e.substitution_gap, worst_gap_allow = allow, worst_gap_at = suite[fi].name;
        }
      }
    }
    const double C = constant_estimate(mine);
    out.constants[name] = C;

    CheckRecord sweep;
    sweep.name = "carleman." + name + ".parameter_sweep";
    sweep.anchor = carleman_anchor(k);
    sweep.tolerance = opt.growth_tolerance;
    sweep.values = {{"max_growth_per_doubling", max_growth}, {"at", growth_at}, {"min_slope", worst_slope},
                    {"functions", suite.size()}, {"degenerate", degenerate}};
    sweep.verdict = all_bounded && degenerate < int(suite.size()) ? Verdict::pass : Verdict::fail;
    if (k == CarlemanKind::f10) sweep.values["max_growth_without_q_term"] = max_growth_noq;
    if (degenerate) sweep.note = std::to_string(degenerate) + " degenerate sweeps (u = 0)";
    out.report.add(sweep);

    CheckRecord cst;
    cst.name = "carleman." + name + ".constant";
    cst.anchor = carleman_anchor(k);
    cst.values = {{"max_ratio", max_ratio}, {"at", ratio_at}, {"constant", C}};
    auto it = opt.archived.find(name);
    if (it != opt.archived.end()) {
      const double Ca = it->second;
      const double drift = Ca > 0 ? std::abs(C - Ca) / Ca : 0.0;
      cst.values["archived"] = Ca;
      cst.values["drift"] = drift;
      cst.tolerance = opt.reproduce_tolerance;
      cst.verdict = max_ratio <= Ca && drift <= opt.reproduce_tolerance ? Verdict::pass : Verdict::fail;
    } else {
      cst.verdict = Verdict::diagnostic;
      cst.note = "no archived constant";
    }
    out.report.add(cst);
  }
  if (opt.settings.substitution_check) {
    CheckRecord r;
    r.name = "carleman.substitution";
    r.anchor = anchors::carleman_substitution;
    r.tolerance = opt.substitution_tolerance;
    r.values = {{"max_gap", worst_gap}, {"allowed_at_max", worst_gap_allow}, {"at", worst_gap_at}};
    r.verdict = gap_ok ? Verdict::pass : Verdict::fail;
    out.report.add(r);
  }
  return out;
}

}  // namespace grushin
