#include "grushin/calculus.hpp"

#include <cmath>
#include <vector>

namespace grushin {

namespace {

template <class T>
T znorm_of(const BasicPoint<T>& p) {
  using std::sqrt;
  return sqrt(T(p.z.squaredNorm()));
}

template <class T, class F>
T nested_x(const GrushinSpace& s, const F& f, const BasicPoint<T>& p, std::span<const int> fields,
           T h) {
  using std::pow;
  if (fields.empty()) return f(p);
  const int l = fields[0];
  T coef = 1;
  if (l >= s.m()) coef = pow(znorm_of(p), T(s.gamma()));
  BasicPoint<T> pp = p, pm = p;
  pp.coord(l) += h * coef;
  pm.coord(l) -= h * coef;
  if (pp.coord(l) == p.coord(l)) throw FdError("finite-difference step underflow");
  auto rest = fields.subspan(1);
  return (nested_x(s, f, pp, rest, h) - nested_x(s, f, pm, rest, h)) / (2 * h);
}

Point shifted(const Point& p, double h, const Vec& w) {
  Point q = p;
  const int m = int(p.z.size());
  for (int l = 0; l < w.size(); ++l) q.coord(l) += h * w[l];
  (void)m;
  return q;
}

double nested_v(const ScalarField& f, const Point& p, std::span<const VectorField> fields, double h) {
  if (fields.empty()) return f(p);
  const Vec w = fields[0](p);
  const Point pp = shifted(p, h, w), pm = shifted(p, -h, w);
  auto rest = fields.subspan(1);
  return (nested_v(f, pp, rest, h) - nested_v(f, pm, rest, h)) / (2 * h);
}

FdEstimate richardson(double coarse, double fine) {
  FdEstimate e;
  e.value = (4 * fine - coarse) / 3;
  e.error = std::abs(fine - coarse) / 3;
  if (!std::isfinite(e.value) || !std::isfinite(e.error))
    throw FdError("non-finite value in finite-difference stencil");
  return e;
}

}  // namespace

ScalarField ScalarField::constant(double c) {
  ScalarField f([c](const Point&) { return c; });
  f.with_quad([c](const QPoint&) { return Quad(c); });
  f.with_gradient([c](const Point& p) { return Vec(Vec::Zero(p.N())); });
  f.with_hessian([](const Point& p) { return Mat(Mat::Zero(p.N(), p.N())); });
  return f;
}

VectorField x_field(const GrushinSpace& s, int l) {
  if (l < 0 || l >= s.N()) throw DimensionError("field index out of range");
  const int m = s.m();
  const double g = s.gamma();
  return [l, m, g](const Point& p) {
    Vec w = Vec::Zero(p.N());
    w[l] = l < m ? 1.0 : std::pow(p.z.norm(), g);
    return w;
  };
}

VectorField generator_field(const GrushinSpace& s) {
  return [s](const Point& p) { return generator_coefficients(s, p); };
}

double fd_step(const GrushinSpace& s, const Point& p, int order, const FdOptions& opt) {
  const double base = order <= 1 ? opt.order1_step : opt.higher_step;
  const auto gv = gauge_and_angle(s, p);
  double scale = std::max(1.0, gv.rho);
  if (opt.local_scale) {
    const double zn = p.z.norm();
    if (zn > 0) scale = std::min(scale, zn);
  }
  return base * scale;
}

FdEstimate fd_oracle(const GrushinSpace& s, const ScalarField& f, const Point& p,
                     std::span<const int> fields, const FdOptions& opt) {
  check_dims(s, p);
  for (int l : fields)
    if (l < 0 || l >= s.N()) throw DimensionError("field index out of range");
  if (fields.empty()) return {f(p), 0.0};
  const double h = fd_step(s, p, int(fields.size()), opt);
  if (opt.use_quad && f.has_quad()) {
    const QPoint q = to_quad(p);
    auto fq = [&f](const QPoint& x) { return f(x); };
    const Quad c = nested_x(s, fq, q, fields, Quad(h));
    const Quad fi = nested_x(s, fq, q, fields, Quad(h) / 2);
    return richardson(double(c), double(fi));
  }
  auto fd = [&f](const Point& x) { return f(x); };
  const double c = nested_x(s, fd, p, fields, h);
  const double fi = nested_x(s, fd, p, fields, h / 2);
  return richardson(c, fi);
}

FdEstimate fd_oracle(const GrushinSpace& s, const ScalarField& f, const Point& p,
                     std::initializer_list<int> fields, const FdOptions& opt) {
  std::vector<int> v(fields);
  return fd_oracle(s, f, p, std::span<const int>(v), opt);
}

FdEstimate fd_along(const GrushinSpace& s, const ScalarField& f, const Point& p,
                    std::span<const VectorField> fields, const FdOptions& opt) {
  check_dims(s, p);
  if (fields.empty()) return {f(p), 0.0};
  const double h = fd_step(s, p, int(fields.size()), opt);
  const double c = nested_v(f, p, fields, h);
  const double fi = nested_v(f, p, fields, h / 2);
  return richardson(c, fi);
}

double x_apply(const GrushinSpace& s, int i, const ScalarField& f, const Point& p) {
  if (i < 0 || i >= s.N()) throw DimensionError("field index out of range");
  if (f.has_gradient()) return f.x_gradient(p)[i];
  return fd_oracle(s, f, p, {i}).value;
}

Vec x_gradient(const GrushinSpace& s, const ScalarField& f, const Point& p) {
  if (f.has_gradient()) return f.x_gradient(p);
  Vec g(s.N());
  for (int i = 0; i < s.N(); ++i) g[i] = fd_oracle(s, f, p, {i}).value;
  return g;
}

double generator_apply(const GrushinSpace& s, const ScalarField& f, const Point& p) {
  check_dims(s, p);
  const double zn = p.z.norm();
  if (f.has_gradient() && zn > 0) {
    const Vec g = f.x_gradient(p);
    double out = 0;
    for (int i = 0; i < s.m(); ++i) out += p.z[i] * g[i];
    const double zg = std::pow(zn, s.gamma());
    for (int j = 0; j < s.k(); ++j) out += (s.gamma() + 1.0) * p.t[j] * g[s.m() + j] / zg;
    return out;
  }
  const VectorField z[] = {generator_field(s)};
  FdOptions opt;
  opt.local_scale = zn > 0;
  return fd_along(s, f, p, z, opt).value;
}

GaugeJets::GaugeJets(const GrushinSpace& s, const Point& p) : m_(s.m()), g_(s.gamma()), p_(p) {
  check_dims(s, p);
  znorm = p.z.norm();
  if (znorm == 0) throw DomainError("closed-form derivatives of the gauge need z != 0");
  const auto gv = gauge_and_angle(s, p);
  rho = gv.rho;
  psi = gv.psi;
  const int N = s.N();
  const double g = g_, g1 = g_ + 1.0;
  const double zg = std::pow(znorm, g);
  const double sq = std::sqrt(psi);
  grad.resize(N);
  psi_grad.resize(N);
  for (int l = 0; l < m_; ++l) {
    grad[l] = psi * p.z[l] / rho;
    psi_grad[l] = 2 * g * psi * p.z[l] / (znorm * znorm) - 2 * g * psi * psi * p.z[l] / (rho * rho);
  }
  for (int j = 0; j < s.k(); ++j) {
    grad[m_ + j] = g1 * sq * p.t[j] / std::pow(rho, g1);
    psi_grad[m_ + j] = -2 * g * g1 * psi * p.t[j] * zg / std::pow(rho, 2 * g + 2);
  }
  const double D = psi * psi / (rho * rho * rho), E = psi / rho;
  hess.resize(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double c1, c2;
      split(i, j, c1, c2);
      hess(i, j) = c1 * D + c2 * E;
    }
}

void GaugeJets::split(int i, int j, double& c1, double& c2) const {
  const double g = g_, g1 = g_ + 1.0, s = znorm;
  const double sg = std::pow(s, g);
  if (i < m_ && j < m_) {
    const double zz = p_.z[i] * p_.z[j];
    c1 = -(2 * g + 1) * zz;
    c2 = 2 * g * zz / (s * s) + (i == j ? 1.0 : 0.0);
  } else if (i < m_) {
    const double zt = p_.z[i] * p_.t[j - m_];
    c1 = -(2 * g + 1) * g1 * zt / sg;
    c2 = g * g1 * zt / (sg * s * s);
  } else if (j < m_) {
    const double zt = p_.z[j] * p_.t[i - m_];
    c1 = -(2 * g + 1) * g1 * zt / sg;
    c2 = 0;
  } else {
    const double tt = p_.t[i - m_] * p_.t[j - m_];
    c1 = -(2 * g + 1) * g1 * g1 * tt / (sg * sg);
    c2 = i == j ? g1 : 0.0;
  }
}

void GaugeJets::split_derivative(int r, int i, int j, double& dc1, double& dc2) const {
  const double g = g_, g1 = g_ + 1.0, s = znorm, s2 = s * s;
  const double sg = std::pow(s, g);
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  dc1 = dc2 = 0;
  if (i < m_ && j < m_) {
    if (r >= m_) return;
    const double dzz = d(r, i) * p_.z[j] + d(r, j) * p_.z[i];
    dc1 = -(2 * g + 1) * dzz;
    dc2 = 2 * g * (dzz / s2 - 2 * p_.z[i] * p_.z[j] * p_.z[r] / (s2 * s2));
    return;
  }
  if (i < m_ || j < m_) {
    // zi carries the z-index and tj the t-index of the pair.
    const int zi = i < m_ ? i : j;
    const int tj = i < m_ ? j - m_ : i - m_;
    const double t = p_.t[tj], z = p_.z[zi];
    double d_a, d_b;  // X_r of z t/|z|^γ and of z t/|z|^{γ+2}
    if (r < m_) {
      d_a = d(r, zi) * t / sg - g * z * p_.z[r] * t / (sg * s2);
      d_b = d(r, zi) * t / (sg * s2) - (g + 2) * z * p_.z[r] * t / (sg * s2 * s2);
    } else {
      d_a = z * d(r - m_, tj);
      d_b = z * d(r - m_, tj) / s2;
    }
    dc1 = -(2 * g + 1) * g1 * d_a;
    if (i < m_) dc2 = g * g1 * d_b;
    return;
  }
  const int a = i - m_, b = j - m_;
  const double ta = p_.t[a], tb = p_.t[b];
  if (r < m_)
    dc1 = -(2 * g + 1) * g1 * g1 * (-2 * g * ta * tb * p_.z[r] / (sg * sg * s2));
  else
    dc1 = -(2 * g + 1) * g1 * g1 * (d(r - m_, a) * tb + d(r - m_, b) * ta) / sg;
}

// X_r(ψ^a/ρ^b) / (ψ^a/ρ^b).
double GaugeJets::kappa(int r, double a, double b) const {
  return a * psi_grad[r] / psi - b * grad[r] / rho;
}

double GaugeJets::third(int r, int i, int j) const {
  const int N = int(grad.size());
  if (r < 0 || i < 0 || j < 0 || r >= N || i >= N || j >= N)
    throw DimensionError("field index out of range");
  double c1, c2, dc1, dc2;
  split(i, j, c1, c2);
  split_derivative(r, i, j, dc1, dc2);
  const double D = psi * psi / (rho * rho * rho), E = psi / rho;
  return dc1 * D + c1 * D * kappa(r, 2, 3) + dc2 * E + c2 * E * kappa(r, 1, 1);
}

Vec psi_x_gradient(const GrushinSpace& s, const Point& p) { return GaugeJets(s, p).psi_grad; }

ScalarField rho_field(const GrushinSpace& s) {
  const double g = s.gamma();
  ScalarField f([s](const Point& p) { return gauge_and_angle(s, p).rho; });
  f.with_quad([g](const QPoint& p) { return gauge_and_angle_t(g, p).rho; });
  f.with_gradient([s](const Point& p) { return GaugeJets(s, p).grad; });
  f.with_hessian([s](const Point& p) { return GaugeJets(s, p).hess; });
  return f;
}

ScalarField psi_field(const GrushinSpace& s) {
  const double g = s.gamma();
  ScalarField f([s](const Point& p) { return gauge_and_angle(s, p).psi; });
  f.with_quad([g](const QPoint& p) { return gauge_and_angle_t(g, p).psi; });
  f.with_gradient([s](const Point& p) { return GaugeJets(s, p).psi_grad; });
  return f;
}

ScalarField coordinate_field(const GrushinSpace& s, int l) {
  if (l < 0 || l >= s.N()) throw DimensionError("coordinate index out of range");
  const int m = s.m();
  const double g = s.gamma();
  ScalarField f([l](const Point& p) { return p.coord(l); });
  f.with_quad([l](const QPoint& p) { return p.coord(l); });
  f.with_gradient([l, m, g](const Point& p) {
    Vec v = Vec::Zero(p.N());
    v[l] = l < m ? 1.0 : std::pow(p.z.norm(), g);
    return v;
  });
  f.with_hessian([l, m, g](const Point& p) {
    Mat h = Mat::Zero(p.N(), p.N());
    if (l >= m) {
      const double zn = p.z.norm();
      for (int i = 0; i < m; ++i) h(i, l) = g * std::pow(zn, g - 2) * p.z[i];
    }
    return h;
  });
  return f;
}

}  // namespace grushin
