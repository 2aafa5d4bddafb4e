#include "grushin/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "grushin/parallel.hpp"

namespace grushin {

namespace {

// Neumaier-compensated accumulator.
struct Accum {
  double sum = 0, comp = 0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

template <int N>
void gauss_fill(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& b = G::weights();
  x.clear();
  w.clear();
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0) continue;
    x.push_back(-a[i]);
    w.push_back(b[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    x.push_back(a[i]);
    w.push_back(b[i]);
  }
}

// Gauss-Legendre on [-1, 1].
void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 2: gauss_fill<2>(x, w); break;
    case 3: gauss_fill<3>(x, w); break;
    case 4: gauss_fill<4>(x, w); break;
    case 5: gauss_fill<5>(x, w); break;
    case 6: gauss_fill<6>(x, w); break;
    case 8: gauss_fill<8>(x, w); break;
    case 10: gauss_fill<10>(x, w); break;
    case 12: gauss_fill<12>(x, w); break;
    case 16: gauss_fill<16>(x, w); break;
    case 20: gauss_fill<20>(x, w); break;
    default: throw Error("unsupported Gauss rule size " + std::to_string(n));
  }
}

double min_abs(double lo, double hi) { return lo <= 0 && hi >= 0 ? 0.0 : std::min(std::abs(lo), std::abs(hi)); }
double max_abs(double lo, double hi) { return std::max(std::abs(lo), std::abs(hi)); }

double gauge_from_norms(double g, double zn, double tn) {
  const double g1 = g + 1;
  const double s = std::pow(zn, 2 * g1) + g1 * g1 * tn * tn;
  return s > 0 ? std::pow(s, 1 / (2 * g1)) : 0.0;
}

constexpr double kMinZ = 1e-6;

}  // namespace

void AnnulusDomain::validate() const {
  if (!(r_in >= 0) || !(r_out > r_in) || !std::isfinite(r_out))
    throw DomainError("annulus needs 0 <= r_in < r_out");
}

void QuadratureGrid::validate() const {
  if (n_z < 2 || n_z % 2) throw Error("n_z must be even and at least 2");
  if (!(t_factor > 0) || char_refine < 1 || inner_refine < 1 || boundary_samples < 1)
    throw Error("grid refinement factors must be >= 1");
}

int QuadratureGrid::n_t() const { return std::max(1, int(std::lround(n_z * t_factor))); }

QuadratureGrid QuadratureGrid::halved() const {
  QuadratureGrid g = *this;
  g.n_z = std::max(2, n_z / 2);
  if (g.n_z % 2) ++g.n_z;
  return g;
}

QuadratureGrid QuadratureGrid::doubled() const {
  QuadratureGrid g = *this;
  g.n_z = 2 * n_z;
  return g;
}

void WeightedIntegral::validate() const {
  if (kind == Kind::power_exp && !(epsilon > 0 && epsilon < 1)) throw Error("weight epsilon must lie in (0,1)");
  if ((factor == Factor::mu || factor == Factor::inv_mu) && !coeff) throw Error("mu factor needs coefficients");
}

double WeightedIntegral::log_radial(double rho) const {
  const double l = std::log(rho);
  double v = a * l;
  if (kind == Kind::power_exp) v += 2 * alpha * std::pow(rho, epsilon);
  if (kind == Kind::power_logsq) v += beta * l * l;
  return v - log_reference;
}

double WeightedIntegral::log_radial_slope(double rho) const {
  double v = a / rho;
  if (kind == Kind::power_exp) v += 2 * alpha * epsilon * std::pow(rho, epsilon - 1);
  if (kind == Kind::power_logsq) v += 2 * beta * std::log(rho) / rho;
  return v;
}

double WeightedIntegral::operator()(const GrushinSpace& s, const Point& p, double rho, double psi) const {
  double w = (kind == Kind::power && a == 0 && log_reference == 0) ? 1.0 : std::exp(log_radial(rho));
  switch (factor) {
    case Factor::none: break;
    case Factor::psi: w *= psi; break;
    case Factor::mu: w *= derived_at(*coeff, s, p).mu; break;
    case Factor::inv_mu: w /= derived_at(*coeff, s, p).mu; break;
  }
  return w;
}

std::vector<double> integrate_once(const GrushinSpace& s, const AnnulusDomain& d, const QuadratureGrid& g,
                                   int count, const MultiIntegrand& f, const WeightedIntegral& w,
                                   std::size_t* cells_out, std::size_t* samples_out) {
  d.validate();
  g.validate();
  w.validate();
  const int m = s.m(), N = s.N();
  const double gam = s.gamma();
  const double r = d.r_out;
  const double T = std::pow(r, gam + 1) / (gam + 1);
  const int nz = g.n_z, nt = g.n_t();
  const double hz = 2 * r / nz, ht = 2 * T / nt;
  std::array<int, kMaxDim> n{};
  std::array<double, kMaxDim> lo{}, h{};
  for (int l = 0; l < N; ++l) {
    n[l] = l < m ? nz : nt;
    lo[l] = l < m ? -r : -T;
    h[l] = l < m ? hz : ht;
  }
  double cell_vol = 1;
  for (int l = 0; l < N; ++l) cell_vol *= h[l];

  std::vector<std::vector<Accum>> rows(nz, std::vector<Accum>(count));
  std::vector<std::size_t> row_cells(nz, 0), row_samples(nz, 0), row_bad(nz, 0);

  parallel_for(std::size_t(nz), g.threads, [&](std::size_t row) {
    std::array<int, kMaxDim> idx{};
    idx[0] = int(row);
    std::vector<double> out(count);
    Point p;
    p.z.resize(m);
    p.t.resize(s.k());
    std::array<int, kMaxDim> sub{};
    std::array<int, kMaxDim> sidx{};
    while (true) {
      double zmin2 = 0, zmax2 = 0, tmin2 = 0, tmax2 = 0;
      for (int l = 0; l < N; ++l) {
        const double a = lo[l] + idx[l] * h[l], b = a + h[l];
        const double mn = min_abs(a, b), mx = max_abs(a, b);
        if (l < m) zmin2 += mn * mn, zmax2 += mx * mx;
        else tmin2 += mn * mn, tmax2 += mx * mx;
      }
      const double rmin = gauge_from_norms(gam, std::sqrt(zmin2), std::sqrt(tmin2));
      const double rmax = gauge_from_norms(gam, std::sqrt(zmax2), std::sqrt(tmax2));
      if (!(rmin > d.r_out || rmax < d.r_in)) {
        const bool inside = rmin >= d.r_in && rmax <= d.r_out;
        for (int l = 0; l < N; ++l) sub[l] = 1;
        if (inside) {
          if (std::sqrt(zmin2) < g.char_threshold * r)
            for (int l = 0; l < m; ++l) sub[l] = g.char_refine;
        } else {
          int ns = g.boundary_samples;
          if (d.r_in > 0 && rmin < d.r_in && rmax > d.r_in) ns *= g.inner_refine;
          for (int l = 0; l < N; ++l) sub[l] = ns;
        }
        double sub_vol = cell_vol;
        for (int l = 0; l < N; ++l) sub_vol /= sub[l];
        ++row_cells[row];
        for (int l = 0; l < N; ++l) sidx[l] = 0;
        while (true) {
          for (int l = 0; l < N; ++l) p.coord(l) = lo[l] + idx[l] * h[l] + (sidx[l] + 0.5) * h[l] / sub[l];
          const double zn = p.z.norm();
          if (zn < kMinZ) {
            if (zn == 0) p.z[0] = kMinZ;
            else p.z *= kMinZ / zn;
          }
          const auto gv = gauge_and_angle(s, p);
          if (gv.rho >= d.r_in && gv.rho <= d.r_out) {
            ++row_samples[row];
            f(p, out);
            const double wt = w(s, p, gv.rho, gv.psi) * sub_vol;
            bool ok = std::isfinite(wt);
            for (int c = 0; c < count && ok; ++c) ok = std::isfinite(out[c]);
            if (ok) {
              for (int c = 0; c < count; ++c) rows[row][c].add(out[c] * wt);
            } else {
              ++row_bad[row];
            }
          }
          int l = 0;
          while (l < N && ++sidx[l] == sub[l]) sidx[l++] = 0;
          if (l == N) break;
        }
      }
      int l = 1;
      while (l < N && ++idx[l] == n[l]) idx[l++] = 0;
      if (l >= N) break;
    }
  });

  std::vector<double> result(count, 0.0);
  std::size_t cells = 0, samples = 0, bad = 0;
  for (int rr = 0; rr < nz; ++rr) {
    for (int c = 0; c < count; ++c) result[c] += rows[rr][c].value();
    cells += row_cells[rr];
    samples += row_samples[rr];
    bad += row_bad[rr];
  }
  if (samples == 0) throw DomainError("quadrature grid has no samples inside the annulus");
  if (bad > 0) throw DomainError("integrand not finite at " + std::to_string(bad) + " samples");
  if (cells_out) *cells_out = cells;
  if (samples_out) *samples_out = samples;
  return result;
}

std::vector<IntegralEstimate> integrate_many(const GrushinSpace& s, const AnnulusDomain& d,
                                             const QuadratureGrid& g, int count, const MultiIntegrand& f,
                                             const WeightedIntegral& w) {
  std::size_t cells = 0, samples = 0;
  const auto fine = integrate_once(s, d, g, count, f, w, &cells, &samples);
  const auto coarse = integrate_once(s, d, g.halved(), count, f, w);
  std::vector<IntegralEstimate> out(count);
  for (int c = 0; c < count; ++c) {
    out[c].value = fine[c];
    out[c].error = std::abs(fine[c] - coarse[c]);
    out[c].cells = cells;
    out[c].samples = samples;
  }
  return out;
}

IntegralEstimate integrate(const GrushinSpace& s, const AnnulusDomain& d, const QuadratureGrid& g,
                           const Integrand& f, const WeightedIntegral& w) {
  return integrate_many(s, d, g, 1, [&f](const Point& p, std::span<double> o) { o[0] = f(p); }, w)[0];
}

IntegralEstimate vanishing_profile_integral(const GrushinSpace& s, const ScalarField& u, double r,
                                            const QuadratureGrid& g) {
  WeightedIntegral w;
  w.factor = WeightedIntegral::Factor::psi;
  return integrate(s, {0.0, r}, g, [&u](const Point& p) { const double v = u(p); return v * v; }, w);
}

void PolarGrid::validate() const {
  if (gauss < 2 || radial_panels < 1 || angle_panels < 1 || sphere_points < 2 || !(growth > 0))
    throw Error("invalid polar grid");
}

PolarGrid PolarGrid::coarsened() const {
  PolarGrid g = *this;
  g.radial_panels = std::max(1, radial_panels / 2);
  g.angle_panels = std::max(1, angle_panels / 2);
  g.sphere_points = std::max(4, sphere_points / 2);
  g.grading_slope = grading_slope / 2;
  g.growth = 2 * growth;
  return g;
}

void sphere_rule(int d, int circle_points, std::vector<Vec>& pts, std::vector<double>& wts) {
  pts.clear();
  wts.clear();
  if (d == 1) {
    for (double sgn : {-1.0, 1.0}) {
      Vec v(1);
      v[0] = sgn;
      pts.push_back(v);
      wts.push_back(1.0);
    }
    return;
  }
  if (d == 2) {
    const int n = circle_points;
    for (int i = 0; i < n; ++i) {
      const double th = 2 * std::numbers::pi * (i + 0.5) / n;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      pts.push_back(v);
      wts.push_back(2 * std::numbers::pi / n);
    }
    return;
  }
  // x = (cos θ, sin θ · y), measure sin^{d-2}θ dθ dσ(y).
  std::vector<Vec> sp;
  std::vector<double> sw;
  sphere_rule(d - 1, circle_points, sp, sw);
  std::vector<double> gx, gw;
  int ng = std::max(2, circle_points);
  for (int c : {20, 16, 12, 10, 8, 6, 5, 4, 3, 2})
    if (c <= ng) { ng = c; break; }
  gauss_rule(ng, gx, gw);
  for (std::size_t a = 0; a < gx.size(); ++a) {
    const double th = 0.5 * std::numbers::pi * (gx[a] + 1);
    const double wt = 0.5 * std::numbers::pi * gw[a] * std::pow(std::sin(th), d - 2);
    for (std::size_t b = 0; b < sp.size(); ++b) {
      Vec v(d);
      v[0] = std::cos(th);
      v.tail(d - 1) = std::sin(th) * sp[b];
      pts.push_back(v);
      wts.push_back(wt * sw[b]);
    }
  }
}

void for_each_polar_node(const GrushinSpace& s, const AnnulusDomain& d, const PolarGrid& g,
                         const std::function<void(const PolarNode&)>& visit) {
  d.validate();
  g.validate();
  const int m = s.m(), k = s.k();
  const double gam = s.gamma(), g1 = gam + 1, Q = s.Q();
  std::vector<double> gx, gw;
  gauss_rule(g.gauss, gx, gw);

  // radial panels
  std::vector<double> edges{d.r_in};
  const double span = d.r_out - d.r_in;
  const double cap = span / g.radial_panels;
  const double w0 = g.grading_slope > 0 ? std::min(cap, 0.5 / g.grading_slope) : cap;
  while (edges.back() < d.r_out) {
    const double x = edges.back();
    const double width = std::min(cap, std::max(w0, g.growth * (x - d.r_in)));
    edges.push_back(x + width >= d.r_out - 1e-3 * width ? d.r_out : x + width);
  }
  std::vector<double> rr, rw;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      rr.push_back(x);
      rw.push_back(0.5 * (b - a) * gw[i] * std::pow(x, Q - 1));
    }
  }
  // polar angle
  std::vector<double> ph_sin, ph_cos, ph_D, ph_w;
  const double half_pi = 0.5 * std::numbers::pi;
  for (int e = 0; e < g.angle_panels; ++e) {
    const double a = half_pi * e / g.angle_panels, b = half_pi * (e + 1) / g.angle_panels;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double ph = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      const double sn = std::sin(ph), cs = std::cos(ph);
      // D = (1 - sin^{2γ+2}φ)^{1/2} without cancellation near φ = π/2
      const double D = std::sqrt(-std::expm1(g1 * std::log1p(-cs * cs)));
      const double jac = std::pow(sn, m - 1) * std::pow(D, k - 2) * cs / std::pow(g1, k - 1);
      ph_sin.push_back(sn);
      ph_cos.push_back(cs);
      ph_D.push_back(D);
      ph_w.push_back(0.5 * (b - a) * gw[i] * jac);
    }
  }
  std::vector<Vec> zp, tp;
  std::vector<double> zw, tw;
  sphere_rule(m, g.sphere_points, zp, zw);
  sphere_rule(k, g.sphere_points, tp, tw);

  PolarNode nd;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double rho = rr[i];
    for (std::size_t a = 0; a < ph_w.size(); ++a) {
      const double zn = rho * ph_sin[a];
      const double tn = std::pow(rho, g1) * ph_D[a] / g1;
      const double psi = std::pow(ph_sin[a], 2 * gam);
      for (std::size_t b = 0; b < zp.size(); ++b)
        for (std::size_t c = 0; c < tp.size(); ++c) {
          nd.p.z = zn * zp[b];
          nd.p.t = tn * tp[c];
          nd.rho = rho;
          nd.psi = psi;
          nd.weight = rw[i] * ph_w[a] * zw[b] * tw[c];
          visit(nd);
        }
    }
  }
}

namespace {

// Composite Gauss on [a, b], panels growing away from `a` (or from `b` when toward_b).
void graded_rule(double a, double b, bool toward_b, double w0, int panels, double growth,
                 const std::vector<double>& gx, const std::vector<double>& gw, std::vector<double>& x,
                 std::vector<double>& w) {
  const double span = b - a;
  if (!(span > 0)) return;
  const double cap = span / panels;
  w0 = w0 > 0 ? std::min(cap, w0) : cap;
  std::vector<double> edges{0.0};
  while (edges.back() < span) {
    const double e = edges.back();
    const double width = std::min(cap, std::max(w0, growth * e));
    edges.push_back(e + width >= span - 1e-3 * width ? span : e + width);
  }
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double d = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i];
      x.push_back(toward_b ? b - d : a + d);
      w.push_back(0.5 * (hi - lo) * gw[i]);
    }
  }
}

// Graded rule on [lo, hi] for a t-coordinate: panels refine toward the value of least |t|.
void t_rule(double lo, double hi, double slope, double rho0, double gam, int panels, double growth,
            const std::vector<double>& gx, const std::vector<double>& gw, std::vector<double>& x,
            std::vector<double>& w) {
  // ∂ρ/∂t = (γ+1)t/(2ρ^{2γ+1}) and ∂²ρ/∂t² = (γ+1)/(2ρ^{2γ+1}) at t = 0
  const double c = (gam + 1) / (2 * std::pow(rho0, 2 * gam + 1));
  auto w0_at = [&](double t) {
    if (slope <= 0) return 0.0;
    return 0.5 / (slope * c * std::abs(t) + std::sqrt(slope * c));
  };
  if (lo < 0 && hi > 0) {
    graded_rule(lo, 0.0, true, w0_at(0), panels, growth, gx, gw, x, w);
    graded_rule(0.0, hi, false, w0_at(0), panels, growth, gx, gw, x, w);
  } else if (hi <= 0) {
    graded_rule(lo, hi, true, w0_at(hi), panels, growth, gx, gw, x, w);
  } else {
    graded_rule(lo, hi, false, w0_at(lo), panels, growth, gx, gw, x, w);
  }
}

}  // namespace

void TensorBox::validate() const {
  if (!(0 < z_lo && z_lo < z_hi && t_lo < t_hi && t_w > 0)) throw DomainError("invalid tensor box");
}

void for_each_box_node(const GrushinSpace& s, const TensorBox& bx, const PolarGrid& g,
                       const std::function<void(const PolarNode&)>& visit) {
  bx.validate();
  g.validate();
  const int m = s.m(), k = s.k();
  const double gam = s.gamma();
  std::vector<double> gx, gw;
  gauss_rule(g.gauss, gx, gw);
  const double rho0 = gauge_from_norms(gam, bx.z_lo, min_abs(bx.t_lo, bx.t_hi));
  std::vector<double> rx, rw;
  graded_rule(bx.z_lo, bx.z_hi, false, g.grading_slope > 0 ? 0.5 / g.grading_slope : 0.0, g.radial_panels,
              g.growth, gx, gw, rx, rw);
  for (std::size_t i = 0; i < rx.size(); ++i) rw[i] *= std::pow(rx[i], m - 1);
  std::vector<std::vector<double>> tx(static_cast<std::size_t>(k)), tw(static_cast<std::size_t>(k));
  t_rule(bx.t_lo, bx.t_hi, g.grading_slope, rho0, gam, g.radial_panels, g.growth, gx, gw, tx[0], tw[0]);
  for (int j = 1; j < k; ++j)
    t_rule(-bx.t_w, bx.t_w, g.grading_slope, rho0, gam, g.radial_panels, g.growth, gx, gw, tx[std::size_t(j)],
           tw[std::size_t(j)]);
  std::vector<Vec> zp;
  std::vector<double> zw;
  sphere_rule(m, g.sphere_points, zp, zw);

  PolarNode nd;
  nd.p.t.resize(k);
  std::vector<std::size_t> idx(std::size_t(k), 0);
  for (std::size_t i = 0; i < rx.size(); ++i)
    for (std::size_t b = 0; b < zp.size(); ++b) {
      nd.p.z = rx[i] * zp[b];
      const double wz = rw[i] * zw[b];
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        double w = wz;
        for (int j = 0; j < k; ++j) {
          nd.p.t[j] = tx[std::size_t(j)][idx[std::size_t(j)]];
          w *= tw[std::size_t(j)][idx[std::size_t(j)]];
        }
        const auto gv = gauge_and_angle(s, nd.p);
        nd.rho = gv.rho;
        nd.psi = gv.psi;
        nd.weight = w;
        visit(nd);
        int j = 0;
        for (; j < k; ++j) {
          if (++idx[std::size_t(j)] < tx[std::size_t(j)].size()) break;
          idx[std::size_t(j)] = 0;
        }
        if (j == k) break;
      }
    }
}

std::vector<PolarNode> polar_nodes(const GrushinSpace& s, const AnnulusDomain& d, const PolarGrid& g) {
  std::vector<PolarNode> nodes;
  for_each_polar_node(s, d, g, [&nodes](const PolarNode& n) { nodes.push_back(n); });
  return nodes;
}

double unit_ball_volume(const GrushinSpace& s, const PolarGrid& g) {
  double v = 0;
  for_each_polar_node(s, {0.0, 1.0}, g, [&v](const PolarNode& nd) { v += nd.weight; });
  return v;
}

}  // namespace grushin
