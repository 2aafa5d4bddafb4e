#include "grushin/geometry.hpp"

#include <string>

namespace grushin {

GrushinSpace::GrushinSpace(int m, int k, double gamma) : m_(m), k_(k), gamma_(gamma) {
  if (m < 1) throw DimensionError("m must be at least 1");
  if (k < 0) throw DimensionError("k must be non-negative");
  if (m + k > kMaxDim) throw DimensionError("m + k exceeds " + std::to_string(kMaxDim));
  if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
}

Point make_point(std::initializer_list<double> z, std::initializer_list<double> t) {
  Point p;
  p.z.resize(Eigen::Index(z.size()));
  p.t.resize(Eigen::Index(t.size()));
  int i = 0;
  for (double v : z) p.z[i++] = v;
  i = 0;
  for (double v : t) p.t[i++] = v;
  return p;
}

QPoint to_quad(const Point& p) {
  QPoint q;
  q.z = p.z.cast<Quad>();
  q.t = p.t.cast<Quad>();
  return q;
}

void check_dims(const GrushinSpace& s, const Point& p) {
  if (p.z.size() != s.m() || p.t.size() != s.k())
    throw DimensionError("point dimensions (" + std::to_string(p.z.size()) + "," +
                         std::to_string(p.t.size()) + ") do not match space (" +
                         std::to_string(s.m()) + "," + std::to_string(s.k()) + ")");
}

GaugeValue<double> gauge_and_angle(const GrushinSpace& s, const Point& p) {
  check_dims(s, p);
  return gauge_and_angle_t(s.gamma(), p);
}

GaugeValue<Quad> gauge_and_angle(const GrushinSpace& s, const QPoint& p) {
  if (p.z.size() != s.m() || p.t.size() != s.k()) throw DimensionError("point dimensions");
  return gauge_and_angle_t(s.gamma(), p);
}

Point dilate(const GrushinSpace& s, double lambda, const Point& p) {
  check_dims(s, p);
  if (!(lambda > 0)) throw DomainError("dilation factor must be positive");
  Point q = p;
  q.z *= lambda;
  q.t *= std::pow(lambda, s.gamma() + 1.0);
  return q;
}

Vec generator_coefficients(const GrushinSpace& s, const Point& p) {
  Vec c(s.N());
  for (int i = 0; i < s.m(); ++i) c[i] = p.z[i];
  for (int j = 0; j < s.k(); ++j) c[s.m() + j] = (s.gamma() + 1.0) * p.t[j];
  return c;
}

}  // namespace grushin
