#include "grushin/ucp.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "grushin/parallel.hpp"
#include "grushin/sampling.hpp"

namespace grushin {

void FDGrid::validate() const {
  if (n < 5 || n % 2 == 0) throw DomainError("FD grid needs an odd node count ≥ 5 per axis");
  if (!(r_out > 0) || !std::isfinite(r_out)) throw DomainError("FD grid radius must be positive");
}

namespace {

struct Layout {
  GrushinSpace s{1, 1, 1.0};
  int N = 2, n = 0;
  std::array<double, kMaxDim> lo{}, h{};
  std::array<std::size_t, kMaxDim> stride{};
  std::size_t total = 1;

  Layout(const GrushinSpace& sp, const FDGrid& g) : s(sp), N(sp.N()), n(g.n) {
    g.validate();
    const double T = std::pow(g.r_out, sp.gamma() + 1) / (sp.gamma() + 1);
    for (int l = 0; l < N; ++l) {
      const double half = l < sp.m() ? g.r_out : T;
      lo[l] = -half;
      h[l] = 2 * half / (n - 1);
      stride[l] = total;
      total *= std::size_t(n);
    }
  }

  int index(std::size_t i, int l) const { return int(i / stride[l] % std::size_t(n)); }
  bool on_box_boundary(std::size_t i) const {
    for (int l = 0; l < N; ++l) {
      const int j = index(i, l);
      if (j == 0 || j == n - 1) return true;
    }
    return false;
  }
  Point point(std::size_t i) const {
    Point p;
    p.z = Vec::Zero(s.m());
    p.t = Vec::Zero(s.k());
    // Centered index so that the middle node is exactly zero.
    for (int l = 0; l < N; ++l) p.coord(l) = (index(i, l) - (n - 1) / 2) * h[l];
    return p;
  }
  double cell_volume() const {
    double v = 1;
    for (int l = 0; l < N; ++l) v *= h[l];
    return v;
  }
};

// Node data shared by assembly, application and post-processing.
struct NodeData {
  std::vector<double> rho, psi, zpow;  // zpow = |z|^γ
  std::vector<double> a;               // N×N per node, row-major
  std::vector<char> fixed;
};

NodeData node_data(const Layout& L, const CoefficientField* A, const AnnulusDomain& d) {
  NodeData nd;
  nd.rho.resize(L.total);
  nd.psi.resize(L.total);
  nd.zpow.resize(L.total);
  nd.fixed.resize(L.total);
  if (A) nd.a.resize(L.total * std::size_t(L.N * L.N));
  for (std::size_t i = 0; i < L.total; ++i) {
    const Point p = L.point(i);
    const auto gv = gauge_and_angle(L.s, p);
    nd.rho[i] = gv.rho;
    nd.psi[i] = gv.psi;
    nd.zpow[i] = std::pow(p.z.norm(), L.s.gamma());
    const bool inside = gv.rho < d.r_out && (d.r_in == 0 || gv.rho > d.r_in);
    nd.fixed[i] = !inside || L.on_box_boundary(i);
    if (A) {
      const Mat a = A->a(p);
      for (int r = 0; r < L.N; ++r)
        for (int c = 0; c < L.N; ++c) nd.a[i * std::size_t(L.N * L.N) + std::size_t(r * L.N + c)] = a(r, c);
    }
  }
  return nd;
}

// Weights of 𝓛_h at node x: emit(J, w) for every neighbour J and finally for x itself.
template <class Emit>
void stencil(const Layout& L, const NodeData& nd, std::size_t x, Emit&& emit) {
  const int N = L.N, m = L.s.m();
  const std::size_t NN = std::size_t(N * N);
  auto a = [&](std::size_t node, int r, int c) { return nd.a[node * NN + std::size_t(r * N + c)]; };
  auto d = [&](std::size_t node, int l) { return l < m ? 1.0 : nd.zpow[node]; };
  double center = 0;
  for (int l = 0; l < N; ++l) {
    // Degenerate factor at the face center: |z| is unchanged along t-axes.
    const double fac = l < m ? 1.0 : nd.zpow[x] * nd.zpow[x];
    for (int sg : {1, -1}) {
      const std::size_t J = sg > 0 ? x + L.stride[l] : x - L.stride[l];
      const double w = fac * 0.5 * (a(x, l, l) + a(J, l, l)) / (L.h[l] * L.h[l]);
      if (w != 0) emit(J, w);
      center -= w;
    }
  }
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          const std::size_t Xi = si > 0 ? x + L.stride[i] : x - L.stride[i];
          const std::size_t Xj = sj > 0 ? x + L.stride[j] : x - L.stride[j];
          const std::size_t J = sj > 0 ? Xi + L.stride[j] : Xi - L.stride[j];
          const double Mi = d(Xi, i) * d(Xi, j) * a(Xi, i, j);
          const double Mj = d(Xj, i) * d(Xj, j) * a(Xj, i, j);
          const double w = si * sj * (Mi + Mj) / (4 * L.h[i] * L.h[j]);
          if (w != 0) emit(J, w);
        }
  emit(x, center);
}

using SpMat = Eigen::SparseMatrix<double>;

struct System {
  Layout L;
  NodeData nd;
  std::vector<std::size_t> free_nodes;
  std::vector<int> unknown;  // node → unknown index or −1
  SpMat S;                   // −𝓛_h + diag(c) on the unknowns
  Eigen::VectorXd bc;        // boundary contribution to the right-hand side
  Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>> ic;

  System(const DegenerateOperator& op, const AnnulusDomain& d, const FDGrid& g, const PointFunction& boundary,
         const std::function<double(std::size_t)>& diag_shift)
      : L(op.space(), g), nd(node_data(L, &op.coeff(), d)) {
    if (d.r_out > g.r_out) throw DomainError("FD box does not contain the outer gauge sphere");
    unknown.assign(L.total, -1);
    for (std::size_t i = 0; i < L.total; ++i)
      if (!nd.fixed[i]) {
        unknown[i] = int(free_nodes.size());
        free_nodes.push_back(i);
      }
    const std::size_t n = free_nodes.size();
    if (n == 0) throw DomainError("FD grid has no interior nodes");
    std::vector<double> gval(L.total, 0.0);
    for (std::size_t i = 0; i < L.total; ++i)
      if (nd.fixed[i]) gval[i] = boundary ? boundary(L.point(i)) : 0.0;
    bc = Eigen::VectorXd::Zero(Eigen::Index(n));
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t x = free_nodes[r];
      stencil(L, nd, x, [&](std::size_t J, double w) {
        if (unknown[J] >= 0) {
          trip.emplace_back(int(r), unknown[J], -w);
        } else {
          bc[Eigen::Index(r)] += w * gval[J];
        }
      });
      if (diag_shift) {
        const double c = diag_shift(x);
        if (!std::isfinite(c)) throw DomainError("potential is not finite on the FD grid");
        if (c != 0) trip.emplace_back(int(r), int(r), c);
      }
    }
    S.resize(Eigen::Index(n), Eigen::Index(n));
    S.setFromTriplets(trip.begin(), trip.end());
    ic.compute(S);
    if (ic.info() != Eigen::Success) throw Error("incomplete Cholesky factorization failed");
  }

  // PCG on S x = b from x; returns the final true relative residual.
  double solve(const Eigen::VectorXd& b, Eigen::VectorXd& x, const SolverOptions& opt, int& iters) const {
    const double bn = b.norm();
    if (bn == 0) {
      x.setZero();
      return 0.0;
    }
    Eigen::VectorXd r = b - S * x;
    if (r.norm() <= opt.tol * bn) return r.norm() / bn;
    Eigen::VectorXd z = ic.solve(r), p = z, q;
    double rz = r.dot(z);
    for (int it = 0; it < opt.max_iter; ++it) {
      q = S * p;
      const double pq = p.dot(q);
      if (!(pq > 0)) throw Error("indefinite system: pᵀSp ≤ 0 in conjugate gradients");
      const double step = rz / pq;
      x += step * p;
      r -= step * q;
      ++iters;
      if (r.norm() <= opt.tol * bn) {
        const double truth = (b - S * x).norm() / bn;
        if (truth <= opt.tol) return truth;
        r = b - S * x;  // recurrence drifted; restart from the true residual
      }
      z = ic.solve(r);
      const double rz1 = r.dot(z);
      p = z + (rz1 / rz) * p;
      rz = rz1;
    }
    std::ostringstream os;
    os << "conjugate gradients did not converge in " << opt.max_iter << " iterations (residual "
       << (b - S * x).norm() / bn << ")";
    throw Error(os.str());
  }

  DiscreteSolution wrap(const DegenerateOperator& op, const AnnulusDomain& d, const FDGrid& g,
                        const PointFunction& boundary, const Eigen::VectorXd& x) const {
    DiscreteSolution out;
    out.space = op.space();
    out.grid = g;
    out.domain = d;
    out.fixed = nd.fixed;
    out.values.assign(L.total, 0.0);
    for (std::size_t i = 0; i < L.total; ++i)
      if (nd.fixed[i] && boundary) out.values[i] = boundary(L.point(i));
    for (std::size_t r = 0; r < free_nodes.size(); ++r) out.values[free_nodes[r]] = x[Eigen::Index(r)];
    return out;
  }
};

void check_domain(const AnnulusDomain& d) {
  d.validate();
}

}  // namespace

Point DiscreteSolution::node(std::size_t i) const { return Layout(space, grid).point(i); }
double DiscreteSolution::spacing(int axis) const { return Layout(space, grid).h[std::size_t(axis)]; }
double DiscreteSolution::cell_volume() const { return Layout(space, grid).cell_volume(); }

double DiscreteSolution::max_error(const PointFunction& exact) const {
  const Layout L(space, grid);
  double e = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!fixed[i]) e = std::max(e, std::abs(values[i] - exact(L.point(i))));
  return e;
}

double DiscreteSolution::l2_norm() const {
  long double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!fixed[i]) sum += (long double)values[i] * values[i];
  return std::sqrt(double(sum) * cell_volume());
}

std::string DiscreteSolution::to_csv() const {
  const Layout L(space, grid);
  std::ostringstream os;
  for (int l = 0; l < space.m(); ++l) os << "z" << l + 1 << ",";
  for (int l = 0; l < space.k(); ++l) os << "t" << l + 1 << ",";
  os << "rho,u,dirichlet\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = L.point(i);
    for (int l = 0; l < L.N; ++l) {
      std::snprintf(buf, sizeof buf, "%.17g,", p.coord(l));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", gauge_and_angle(space, p).rho, values[i], int(fixed[i]));
    os << buf;
  }
  return os.str();
}

DiscreteSolution solve_linear(const DegenerateOperator& op, const PotentialSpec& V, const AnnulusDomain& d,
                              const PointFunction& boundary, const FDGrid& grid, const SolverOptions& opt,
                              const PointFunction& source) {
  check_domain(d);
  if (!(opt.tol > 0)) throw DomainError("solver tolerance must be positive");
  if (V.kind == PotentialSpec::Kind::sublinear) throw DomainError("solve_linear takes a potential, not a sublinearity");
  const GrushinSpace& s = op.space();
  const Layout L(s, grid);
  std::function<double(std::size_t)> shift;
  if (V.has_potential() && V.K != 0) shift = [&](std::size_t i) { return V.value(s, L.point(i)); };
  System sys(op, d, grid, boundary, shift);
  Eigen::VectorXd b = sys.bc;
  if (source)
    for (std::size_t r = 0; r < sys.free_nodes.size(); ++r)
      b[Eigen::Index(r)] -= source(L.point(sys.free_nodes[r]));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  int iters = 0;
  const double res = sys.solve(b, x, opt, iters);
  DiscreteSolution out = sys.wrap(op, d, grid, boundary, x);
  out.residual = res;
  out.iterations = iters;
  out.converged = true;
  return out;
}

DiscreteSolution solve_sublinear(const DegenerateOperator& op, const PotentialSpec& f, const PotentialSpec& V,
                                 const AnnulusDomain& d, const PointFunction& boundary, const FDGrid& grid,
                                 const SublinearOptions& opt) {
  check_domain(d);
  if (f.kind != PotentialSpec::Kind::sublinear && f.kind != PotentialSpec::Kind::none)
    throw DomainError("solve_sublinear needs a sublinear term");
  if (!(opt.tol > 0) || !(opt.damping > 0) || opt.damping > 1) throw DomainError("bad fixed-point settings");
  const GrushinSpace& s = op.space();
  System sys(op, d, grid, boundary, {});
  const std::size_t n = sys.free_nodes.size();
  std::vector<double> psi(n), vpot(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t x = sys.free_nodes[r];
    psi[r] = sys.nd.psi[x];
    if (V.has_potential()) vpot[r] = V.value(s, sys.L.point(x));
  }
  int iters = 0;
  double res = 0;
  // T(u): solve −𝓛_h w = f(u)ψ + Vu with the boundary data.
  auto T = [&](const Eigen::VectorXd& u, Eigen::VectorXd& w, bool with_f) {
    Eigen::VectorXd b = sys.bc;
    for (std::size_t r = 0; r < n; ++r) {
      const Eigen::Index e = Eigen::Index(r);
      b[e] += vpot[r] * u[e];
      if (with_f) b[e] += f.f(u[e]) * psi[r];
    }
    res = sys.solve(b, w, opt.linear, iters);
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(Eigen::Index(n)), w;
  // Linear start with f dropped; with a potential this is itself a fixed point of the explicit map.
  w = u;
  T(u, w, false);
  u = w;
  DiscreteSolution out;
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    w = u;
    T(u, w, true);
    const Eigen::VectorXd next = (1 - opt.damping) * u + opt.damping * w;
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = next;
    out.history.push_back(change);
    if (!std::isfinite(change)) break;
    if (change <= opt.tol) {
      converged = true;
      break;
    }
  }
  DiscreteSolution sol = sys.wrap(op, d, grid, boundary, u);
  sol.history = std::move(out.history);
  sol.iterations = iters;
  sol.converged = converged;
  if (converged) {
    // Relative residual of the nonlinear discrete equation S u = f(u)ψ + Vu + boundary terms.
    Eigen::VectorXd b = sys.bc;
    for (std::size_t r = 0; r < n; ++r) {
      const Eigen::Index e = Eigen::Index(r);
      b[e] += vpot[r] * u[e] + f.f(u[e]) * psi[r];
    }
    sol.residual = b.norm() > 0 ? (sys.S * u - b).norm() / b.norm() : (sys.S * u).norm();
  } else {
    sol.residual = std::numeric_limits<double>::infinity();
  }
  return sol;
}

std::vector<double> apply_discrete(const DegenerateOperator& op, const FDGrid& grid, const AnnulusDomain& d,
                                   const std::vector<double>& u) {
  const Layout L(op.space(), grid);
  if (u.size() != L.total) throw DimensionError("node vector does not match the FD grid");
  const NodeData nd = node_data(L, &op.coeff(), d);
  std::vector<double> out(L.total, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t x = 0; x < L.total; ++x) {
    if (nd.fixed[x]) continue;
    double acc = 0;
    stencil(L, nd, x, [&](std::size_t J, double w) { acc += w * u[J]; });
    out[x] = acc;
  }
  return out;
}

double consistency_error(const DegenerateOperator& op, const FDGrid& grid, const AnnulusDomain& d,
                         const JetFunction& u, double min_znorm) {
  const Layout L(op.space(), grid);
  std::vector<double> samples(L.total);
  for (std::size_t i = 0; i < L.total; ++i) samples[i] = u(L.point(i)).value;
  const auto Lh = apply_discrete(op, grid, d, samples);
  double e = 0;
  for (std::size_t i = 0; i < L.total; ++i) {
    if (std::isnan(Lh[i])) continue;
    const Point p = L.point(i);
    if (p.z.norm() < min_znorm) continue;
    e = std::max(e, std::abs(Lh[i] - apply_L(op.coeff(), u(p), p)));
  }
  return e;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("slope fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

void check_radii(const std::vector<double>& radii, double r_max) {
  if (radii.size() < 2) throw DomainError("vanishing profile needs at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || radii[i] > r_max) throw DomainError("radius outside the solved domain");
    if (i && !(radii[i] < radii[i - 1])) throw DomainError("radii must be strictly decreasing");
  }
}

void fit_profiles(VanishingOrderReport& rep) {
  std::vector<double> lr, ls, li, lr2;
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    lr.push_back(std::log(rep.radii[i]));
    ls.push_back(std::log(rep.sup[i]));
    li.push_back(std::log(rep.integral[i]));
    lr2.push_back(lr.back() * lr.back());
  }
  rep.sup_slope = least_squares_slope(lr, ls);
  rep.integral_slope = least_squares_slope(lr, li);
  rep.logsq_rate = -least_squares_slope(lr2, li);
}

}  // namespace

VanishingOrderReport vanishing_order(const DiscreteSolution& u, const std::vector<double>& radii) {
  check_radii(radii, u.domain.r_out);
  const Layout L(u.space, u.grid);
  VanishingOrderReport rep;
  rep.radii = radii;
  std::vector<double> rho(u.size()), psi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto gv = gauge_and_angle(u.space, L.point(i));
    rho[i] = gv.rho;
    psi[i] = gv.psi;
  }
  const double vol = L.cell_volume();
  for (double r : radii) {
    double sup = 0;
    long double integral = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (rho[i] > r || u.fixed[i]) continue;
      sup = std::max(sup, std::abs(u.values[i]));
      integral += (long double)u.values[i] * u.values[i] * psi[i];
    }
    rep.sup.push_back(sup);
    rep.integral.push_back(double(integral) * vol);
  }
  fit_profiles(rep);
  return rep;
}

VanishingOrderReport vanishing_order(const GrushinSpace& s, const ScalarField& u, const std::vector<double>& radii,
                                     const QuadratureGrid& g) {
  check_radii(radii, std::numeric_limits<double>::infinity());
  VanishingOrderReport rep;
  rep.radii = radii;
  SampleSpec spec;
  spec.count = 4000;
  spec.rho_min = 1e-3;
  spec.rho_max = 1.0;
  spec.seed = 31;
  const auto cloud = sample_cloud(s, spec);
  for (double r : radii) {
    double sup = 0;
    for (const Point& q : cloud) sup = std::max(sup, std::abs(u(dilate(s, r, q))));
    rep.sup.push_back(sup);
    rep.integral.push_back(vanishing_profile_integral(s, u, r, g).value);
  }
  fit_profiles(rep);
  return rep;
}

ExponentFit fit_exponent(const std::vector<double>& K, const std::vector<double>& slope) {
  if (K.size() < 3 || slope.size() != K.size()) throw DomainError("exponent fit needs at least three sweep points");
  ExponentFit best;
  best.rms = std::numeric_limits<double>::infinity();
  const std::size_t n = K.size();
  for (int step = 0; step <= 2000; ++step) {
    const double e = step * 1e-3;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::pow(K[i], e);
      sx += x;
      sy += slope[i];
      sxx += x * x;
      sxy += x * slope[i];
    }
    const double det = double(n) * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * std::max(1.0, sxx)) continue;
    const double a = (double(n) * sxy - sx * sy) / det;
    const double b = (sy - a * sx) / double(n);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double res = a * std::pow(K[i], e) + b - slope[i];
      ss += res * res;
    }
    const double rms = std::sqrt(ss / double(n));
    if (rms < best.rms) best = {e, a, b, rms};
  }
  return best;
}

double oscillatory_boundary(const Point& p) {
  const double z = p.z[0], t = p.t[0];
  return std::cos(3 * std::numbers::pi * z) + std::sin(4 * std::numbers::pi * t) + 0.5;
}

void UcpOptions::validate() const {
  if (spaces.empty()) throw ConfigError("ucp: no spaces");
  for (const auto& sp : spaces) {
    GrushinSpace(sp.m, sp.k, sp.gamma);
    if (sp.grids.size() < 2) throw ConfigError("ucp: every space needs at least two grids");
    for (std::size_t i = 0; i < sp.grids.size(); ++i) {
      FDGrid{sp.grids[i], 1.0}.validate();
      if (i && sp.grids[i] != 2 * (sp.grids[i - 1] - 1) + 1) throw ConfigError("ucp: grids must be successive refinements");
    }
  }
  if (!(annulus_inner > 0 && annulus_inner < 1)) throw ConfigError("ucp: annulus_inner must lie in (0, 1)");
  if (!(hardy_inner >= 0.05 && hardy_inner < 1)) throw ConfigError("ucp: hardy_inner must lie in [0.05, 1)");
  if (K.size() < 3) throw ConfigError("ucp: the K-sweep needs at least three values");
  for (std::size_t i = 1; i < K.size(); ++i)
    if (!(K[i] > K[i - 1])) throw ConfigError("ucp: K values must increase");
  if (!(solver.tol > 0)) throw ConfigError("ucp: solver tolerance must be positive");
  FDGrid{sublinear_grid, 1.0}.validate();
  FDGrid{sweep_grid, 1.0}.validate();
}

namespace {

std::string space_tag(const UcpSpace& sp) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "gamma%g_m%d_k%d", sp.gamma, sp.m, sp.k);
  return buf;
}

std::vector<double> pair_orders(const std::vector<double>& err) {
  std::vector<double> o;
  for (std::size_t i = 1; i < err.size(); ++i) o.push_back(std::log2(err[i - 1] / err[i]));
  return o;
}

JetFunction smooth_probe(const GrushinSpace& s) {
  return [s](const Point& p) {
    const Jet2 z1 = coordinate_jet(s, p, 0), t1 = coordinate_jet(s, p, s.m());
    Jet2 a = 0.7 * z1 + (-0.5) * t1 + z1 * t1;
    if (s.m() > 1) a = a + 0.3 * coordinate_jet(s, p, 1);
    return exp(a);
  };
}

double one(const Point&) { return 1.0; }

struct GridRun {
  double const_err = 0, const_res = 0, fund_err = 0, fund_res = 0, cons_id = 0, cons_A = 0, norm = 0;
  int const_it = 0, fund_it = 0;
};

}  // namespace

VerificationReport ucp_experiments(const CoefficientFactory& coeff, const UcpOptions& opt) {
  opt.validate();
  VerificationReport rep;
  Table exact{{"gamma", "m", "k", "n", "h_z", "constant_error", "fundamental_error", "consistency_identity",
               "consistency_family", "potential_norm"},
              {}};
  const AnnulusDomain ann{opt.annulus_inner, 1.0};

  for (const UcpSpace& sp : opt.spaces) {
    const GrushinSpace s(sp.m, sp.k, sp.gamma);
    const DegenerateOperator opA(coeff(s));
    const DegenerateOperator opI(std::make_shared<IdentityCoefficients>(s));
    const std::string tag = space_tag(sp);
    const double Q = s.Q();
    const PointFunction fund = [s, Q](const Point& p) { return std::pow(gauge_and_angle(s, p).rho, 2 - Q); };
    const JetFunction probe = smooth_probe(s);
    std::vector<GridRun> runs(sp.grids.size());
    parallel_for(sp.grids.size(), opt.threads, [&](std::size_t i) {
      const FDGrid g{sp.grids[i], 1.0};
      GridRun& r = runs[i];
      const auto c = solve_linear(opA, {}, ann, one, g, opt.solver);
      r.const_err = c.max_error(one);
      r.const_res = c.residual;
      r.const_it = c.iterations;
      const auto f = solve_linear(opI, {}, ann, fund, g, opt.solver);
      r.fund_err = f.max_error(fund);
      r.fund_res = f.residual;
      r.fund_it = f.iterations;
      r.cons_id = consistency_error(opI, g, ann, probe, 0.2);
      r.cons_A = consistency_error(opA, g, ann, probe, 0.2);
      r.norm = solve_linear(opA, PotentialSpec::bounded_kpsi(opt.potential_K), ann, one, g, opt.solver).l2_norm();
    });

    std::vector<double> ce, cr, fe, fr, ci, ca, nm, nchange;
    bool const_ok = true, fund_res_ok = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const GridRun& r = runs[i];
      ce.push_back(r.const_err);
      cr.push_back(r.const_res);
      fe.push_back(r.fund_err);
      fr.push_back(r.fund_res);
      ci.push_back(r.cons_id);
      ca.push_back(r.cons_A);
      nm.push_back(r.norm);
      if (i) nchange.push_back(std::abs(r.norm - runs[i - 1].norm));
      const_ok = const_ok && r.const_res <= opt.solver.tol && r.const_err <= opt.exact_tolerance;
      fund_res_ok = fund_res_ok && r.fund_res <= opt.solver.tol;
      exact.add_row({sp.gamma, double(sp.m), double(sp.k), double(sp.grids[i]), 2.0 / (sp.grids[i] - 1), r.const_err,
                     r.fund_err, r.cons_id, r.cons_A, r.norm});
    }

    CheckRecord rc;
    rc.name = "ucp.exact.constant." + tag;
    rc.anchor = anchors::ucp_exact;
    rc.values = {{"grids", sp.grids}, {"max_error", ce}, {"residual", cr}, {"coefficients", opA.coeff().name()}};
    rc.tolerance = opt.exact_tolerance;
    rc.verdict = const_ok ? Verdict::pass : Verdict::fail;
    rep.add(rc);

    const auto fo = pair_orders(fe);
    CheckRecord rf;
    rf.name = "ucp.exact.fundamental." + tag;
    rf.anchor = anchors::ucp_exact;
    rf.values = {{"grids", sp.grids}, {"max_error", fe}, {"residual", fr}, {"pair_orders", fo}};
    rf.tolerance = opt.min_order;
    rf.verdict = fund_res_ok && fo.back() >= opt.min_order ? Verdict::pass : Verdict::fail;
    rf.note = "order measured on the finest refinement pair; identity coefficients";
    rep.add(rf);

    const auto oi = pair_orders(ci), oa = pair_orders(ca);
    CheckRecord rk;
    rk.name = "ucp.consistency." + tag;
    rk.anchor = anchors::ucp_consistency;
    rk.values = {{"grids", sp.grids}, {"error_identity", ci}, {"error_family", ca}, {"orders_identity", oi},
                 {"orders_family", oa}, {"min_znorm", 0.2}};
    rk.tolerance = opt.min_order;
    const double worst = std::min(*std::min_element(oi.begin(), oi.end()), *std::min_element(oa.begin(), oa.end()));
    rk.verdict = worst >= opt.min_order ? Verdict::pass : Verdict::fail;
    rep.add(rk);

    const auto no = pair_orders(nchange);
    CheckRecord rn;
    rn.name = "ucp.potential_norm." + tag;
    rn.anchor = anchors::ucp_potential;
    rn.values = {{"grids", sp.grids}, {"norm", nm}, {"change", nchange}, {"change_orders", no}, {"K", opt.potential_K}};
    rn.verdict = Verdict::diagnostic;
    rn.note = "Dirichlet cell flagging localizes the boundary to first order";
    rep.add(rn);
    rep.regression["ucp." + tag + ".potential_norm"] = {nm.back(), std::max(1e-6, 2 * nchange.back() / nm.back())};
  }
  rep.tables["ucp_exact"] = std::move(exact);

  // Sublinear, K-sweep and Hardy runs in the first space.
  const UcpSpace& sp = opt.spaces.front();
  const GrushinSpace s(sp.m, sp.k, sp.gamma);
  const DegenerateOperator op(coeff(s));
  const std::string tag = space_tag(sp);
  {
    const PotentialSpec f = PotentialSpec::sublinear(opt.sublinear_q, opt.sublinear_c);
    SublinearOptions so;
    so.linear = opt.solver;
    const FDGrid g{opt.sublinear_grid, 1.0}, gc{(opt.sublinear_grid - 1) / 2 + 1, 1.0};
    const auto u = solve_sublinear(op, f, {}, ann, one, g, so);
    const auto uc = solve_sublinear(op, f, {}, ann, one, gc, so);
    double umin = 1e300;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!u.fixed[i]) umin = std::min(umin, u.values[i]);
    const auto lin = solve_linear(op, {}, ann, one, g, opt.solver);
    const auto red = solve_sublinear(op, PotentialSpec{}, {}, ann, one, g, so);
    double reduction = 0;
    for (std::size_t i = 0; i < u.size(); ++i) reduction = std::max(reduction, std::abs(red.values[i] - lin.values[i]));
    const auto zero = solve_sublinear(op, f, {}, ann, [](const Point&) { return 0.0; }, g, so);
    double zmax = 0;
    for (double v : zero.values) zmax = std::max(zmax, std::abs(v));
    CheckRecord r;
    r.name = "ucp.sublinear." + tag;
    r.anchor = anchors::ucp_sublinear;
    r.values = {{"q", f.q},
                {"c", f.c},
                {"grid", g.n},
                {"converged", u.converged},
                {"fixed_point_steps", u.history.size()},
                {"history", u.history},
                {"fixed_point_residual", u.residual},
                {"min_value", umin},
                {"norm", u.l2_norm()},
                {"norm_coarse", uc.l2_norm()},
                {"reduction_to_linear", reduction},
                {"zero_data_sup", zmax}};
    r.tolerance = 10 * so.linear.tol;
    r.verdict = u.converged && umin > 0 && u.residual <= 10 * so.linear.tol && reduction <= 10 * so.tol && zmax == 0
                    ? Verdict::pass
                    : Verdict::fail;
    rep.add(r);
    rep.regression["ucp." + tag + ".sublinear_norm"] = {u.l2_norm(),
                                                       std::max(1e-6, 2 * std::abs(u.l2_norm() - uc.l2_norm()) / u.l2_norm())};
  }
  {
    const FDGrid g{opt.sweep_grid, 1.0};
    std::vector<VanishingOrderReport> prof(opt.K.size());
    parallel_for(opt.K.size(), opt.threads, [&](std::size_t i) {
      const auto u = solve_linear(op, PotentialSpec::bounded_kpsi(opt.K[i]), {0, 1}, oscillatory_boundary, g, opt.solver);
      prof[i] = vanishing_order(u, opt.radii);
    });
    Table sweep{{"K", "sup_slope", "integral_slope", "logsq_rate"}, {}};
    Table profiles{{"K", "r", "sup_abs_u", "integral_u2_psi"}, {}};
    std::vector<double> sup_slope, int_slope;
    bool monotone = true;
    for (std::size_t i = 0; i < opt.K.size(); ++i) {
      const auto& p = prof[i];
      sup_slope.push_back(p.sup_slope);
      int_slope.push_back(p.integral_slope);
      if (i && p.sup_slope < prof[i - 1].sup_slope) monotone = false;
      sweep.add_row({opt.K[i], p.sup_slope, p.integral_slope, p.logsq_rate});
      for (std::size_t j = 0; j < p.radii.size(); ++j) profiles.add_row({opt.K[i], p.radii[j], p.sup[j], p.integral[j]});
      char key[64];
      std::snprintf(key, sizeof key, ".k_sweep.sup_slope_K%g", opt.K[i]);
      rep.regression["ucp." + tag + key] = {p.sup_slope, 0.1};
    }
    const ExponentFit fit = fit_exponent(opt.K, sup_slope);
    const ExponentFit fit_int = fit_exponent(opt.K, int_slope);
    CheckRecord r;
    r.name = "ucp.vanishing.k_sweep." + tag;
    r.anchor = anchors::ucp_vanishing;
    r.values = {{"K", opt.K},
                {"sup_slope", sup_slope},
                {"integral_slope", int_slope},
                {"exponent", fit.e},
                {"a", fit.a},
                {"b", fit.b},
                {"fit_rms", fit.rms},
                {"integral_exponent", fit_int.e},
                {"monotone", monotone},
                {"grid", g.n},
                {"comparison_exponent", 2.0 / 3.0}};
    r.tolerance = opt.max_exponent;
    r.verdict = monotone && fit.e <= opt.max_exponent ? Verdict::pass : Verdict::fail;
    r.note = "slope ≈ a·K^e + b on sup_{B_r}|u|; only monotonicity and e ≤ 1 are asserted";
    rep.add(r);
    rep.tables["ucp_k_sweep"] = std::move(sweep);
    rep.tables["ucp_profiles"] = std::move(profiles);
  }
  {
    const AnnulusDomain d{opt.hardy_inner, 1.0};
    // Oscillatory outer data, zero on the inner hole.
    const PointFunction data = [&s, d](const Point& p) {
      return gauge_and_angle(s, p).rho <= d.r_in ? 0.0 : oscillatory_boundary(p);
    };
    const auto u = solve_linear(op, PotentialSpec::plain(PotentialSpec::Kind::hardy, opt.hardy_C), d, data,
                                FDGrid{opt.sweep_grid, 1.0}, opt.solver);
    std::vector<double> radii;
    for (double r : opt.radii)
      if (r > opt.hardy_inner) radii.push_back(r);
    const auto p = vanishing_order(u, radii);
    CheckRecord r;
    r.name = "ucp.hardy." + tag;
    r.anchor = anchors::ucp_hardy;
    r.values = {{"C", opt.hardy_C},
                {"inner_radius", opt.hardy_inner},
                {"radii", p.radii},
                {"sup", p.sup},
                {"integral", p.integral},
                {"sup_slope", p.sup_slope},
                {"integral_slope", p.integral_slope},
                {"logsq_rate", p.logsq_rate},
                {"residual", u.residual}};
    r.verdict = Verdict::diagnostic;
    rep.add(r);
  }
  return rep;
}

}  // namespace grushin
