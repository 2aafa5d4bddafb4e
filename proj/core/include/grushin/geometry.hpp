#pragma once

#include <cmath>
#include <functional>

#include "grushin/types.hpp"

namespace grushin {

class GrushinSpace {
 public:
  GrushinSpace(int m, int k, double gamma);

  int m() const { return m_; }
  int k() const { return k_; }
  int N() const { return m_ + k_; }
  double gamma() const { return gamma_; }
  double Q() const { return m_ + (gamma_ + 1.0) * k_; }

  friend bool operator==(const GrushinSpace&, const GrushinSpace&) = default;

 private:
  int m_;
  int k_;
  double gamma_;
};

template <class T>
struct BasicPoint {
  VecT<T> z;
  VecT<T> t;

  int N() const { return int(z.size() + t.size()); }
  // Coordinate l in the ordering (z_1..z_m, t_1..t_k).
  T coord(int l) const { return l < z.size() ? z[l] : t[l - z.size()]; }
  T& coord(int l) { return l < z.size() ? z[l] : t[l - z.size()]; }
};

using Point = BasicPoint<double>;
using QPoint = BasicPoint<Quad>;

Point make_point(std::initializer_list<double> z, std::initializer_list<double> t);
QPoint to_quad(const Point& p);
void check_dims(const GrushinSpace& s, const Point& p);

template <class T>
struct GaugeValue {
  T rho{0};
  T psi{0};
  bool at_origin = false;
};

template <class T>
GaugeValue<T> gauge_and_angle_t(double gamma, const BasicPoint<T>& p) {
  using std::pow;
  using std::sqrt;
  const T g1 = T(gamma) + 1;
  const T zn = sqrt(p.z.squaredNorm());
  const T tn2 = p.t.size() ? T(p.t.squaredNorm()) : T(0);
  GaugeValue<T> out;
  if (zn == 0 && tn2 == 0) {
    out.at_origin = true;
    return out;
  }
  const T s = pow(zn, 2 * g1) + g1 * g1 * tn2;
  out.rho = pow(s, 1 / (2 * g1));
  out.psi = zn == 0 ? T(0) : pow(zn / out.rho, 2 * T(gamma));
  return out;
}

GaugeValue<double> gauge_and_angle(const GrushinSpace& s, const Point& p);
GaugeValue<Quad> gauge_and_angle(const GrushinSpace& s, const QPoint& p);

Point dilate(const GrushinSpace& s, double lambda, const Point& p);

// Euclidean coefficients of Z = z·∂_z + (γ+1) t·∂_t.
Vec generator_coefficients(const GrushinSpace& s, const Point& p);

}  // namespace grushin
