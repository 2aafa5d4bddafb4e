#include <gtest/gtest.h>

#include <cmath>

#include "grushin/calculus.hpp"
#include "grushin/jet.hpp"
#include "grushin/sampling.hpp"

namespace grushin {
namespace {

// Values frozen from an independent 40-digit evaluation.
TEST(GaugeJets, FrozenFirstAndSecond) {
  const GrushinSpace s(1, 1, 1.0);
  const GaugeJets J(s, make_point({1}, {1}));
  EXPECT_NEAR(J.grad[0], 0.29906975624424411, 1e-15);
  EXPECT_NEAR(J.grad[1], 0.59813951248848822, 1e-15);
  EXPECT_NEAR(J.grad.squaredNorm(), J.psi, 1e-15);
  EXPECT_NEAR(J.hess(0, 0), 0.71776741498618586, 1e-14);
  EXPECT_NEAR(J.hess(0, 1), 0.23925580499539529, 1e-14);
  EXPECT_NEAR(J.hess(1, 0), -0.35888370749309293, 1e-14);
}

TEST(GaugeJets, FrozenThirdAndAngle) {
  const GrushinSpace s(2, 3, 0.5);
  const GaugeJets J(s, make_point({0.7, -0.3}, {0.2, 0.5, -0.4}));
  EXPECT_NEAR(J.third(0, 1, 2), 0.132721635213042056, 1e-13);
  EXPECT_NEAR(J.third(3, 0, 4), -0.451483910044526654, 1e-13);
  EXPECT_NEAR(J.third(2, 3, 3), 0.092725188895501166, 1e-13);
  EXPECT_NEAR(J.third(1, 2, 0), -0.00144955529243781403, 1e-13);
  EXPECT_NEAR(J.third(4, 4, 1), 0.0488872051658652926, 1e-13);
  const double pg[] = {0.564860204288648755, -0.242082944695135181, -0.121019165401972181,
                       -0.302547913504930452, 0.242038330803944362};
  for (int l = 0; l < 5; ++l) EXPECT_NEAR(J.psi_grad[l], pg[l], 1e-14);
}

TEST(GaugeJets, AxisPoint) {
  const GrushinSpace s(1, 1, 1.0);
  const GaugeJets J(s, make_point({1}, {0}));
  EXPECT_DOUBLE_EQ(J.grad[0], 1.0);
  EXPECT_DOUBLE_EQ(J.grad[1], 0.0);
}

TEST(GaugeJets, DegenerateInputRejected) {
  const GrushinSpace s(1, 1, 1.0);
  EXPECT_THROW(GaugeJets(s, make_point({0}, {1})), DomainError);
  EXPECT_THROW(GaugeJets(s, make_point({0}, {0})), DomainError);
}

TEST(XApply, Examples) {
  const GrushinSpace s(1, 1, 1.0);
  const Point p = make_point({1}, {1});
  const ScalarField rho_plain([s](const Point& q) { return gauge_and_angle(s, q).rho; });
  EXPECT_NEAR(x_apply(s, 0, rho_plain, p), 0.29906975624424411, 1e-9);
  EXPECT_NEAR(x_apply(s, 1, rho_plain, p), 0.59813951248848822, 1e-9);
  const Point q = make_point({0.7}, {-2.0});
  EXPECT_NEAR(x_apply(s, 1, coordinate_field(s, 1), q), 0.7, 1e-15);
  const ScalarField t1([](const Point& x) { return x.t[0]; });
  EXPECT_NEAR(x_apply(s, 1, t1, q), 0.7, 1e-9);
  EXPECT_THROW(x_apply(s, 2, t1, q), DimensionError);
}

TEST(FdOracle, OrderZeroIsEvaluation) {
  const GrushinSpace s(2, 1, 1.0);
  const Point p = make_point({0.3, 0.4}, {0.1});
  const auto e = fd_oracle(s, rho_field(s), p, {});
  EXPECT_EQ(e.value, gauge_and_angle(s, p).rho);
  EXPECT_EQ(e.error, 0.0);
}

TEST(FdOracle, NonFiniteRejected) {
  const GrushinSpace s(1, 1, 1.0);
  const ScalarField bad([](const Point& p) { return p.z[0] > 1 ? NAN : 0.0; });
  EXPECT_THROW(fd_oracle(s, bad, make_point({1}, {0}), {0}), FdError);
}

// The mixed derivative taken as X_{m+j}(X_i ρ) matches case (3), not case (2).
TEST(FdOracle, RespectsCompositionOrder) {
  const GrushinSpace s(2, 1, 1.0);
  SampleSpec spec;
  spec.count = 100;
  spec.rho_min = 0.2;
  spec.rho_max = 5;
  spec.min_znorm = 0.1;
  spec.seed = 3;
  const ScalarField rho = rho_field(s);
  int distinguishable = 0;
  for (const Point& p : sample_cloud(s, spec)) {
    const GaugeJets J(s, p);
    for (int i = 0; i < 2; ++i) {
      const double outer_t = fd_oracle(s, rho, p, {2, i}).value;
      const double outer_z = fd_oracle(s, rho, p, {i, 2}).value;
      const double scale = std::max(1.0, std::abs(J.hess(2, i)));
      EXPECT_NEAR(outer_t, J.hess(2, i), 1e-9 * scale);
      EXPECT_NEAR(outer_z, J.hess(i, 2), 1e-9 * std::max(1.0, std::abs(J.hess(i, 2))));
      if (std::abs(J.hess(i, 2) - J.hess(2, i)) > 1e-6) {
        ++distinguishable;
        EXPECT_GT(std::abs(outer_t - J.hess(i, 2)), 1e-7);
      }
    }
  }
  EXPECT_GT(distinguishable, 150);
}

// Closed forms against nested differences for the ladder configurations.
class Ladder : public ::testing::TestWithParam<std::tuple<double, std::pair<int, int>>> {};

TEST_P(Ladder, ClosedFormsMatchOracle) {
  const auto [g, mk] = GetParam();
  const GrushinSpace s(mk.first, mk.second, g);
  const int N = s.N();
  SampleSpec spec;
  spec.count = 25;
  spec.rho_min = 0.2;
  spec.rho_max = 5;
  spec.psi_min = 1e-4;
  spec.min_znorm = 0.1;
  spec.seed = 19;
  const ScalarField rho = rho_field(s), psi = psi_field(s);
  auto check = [](double cf, FdEstimate fd, double scale) {
    const double tol = std::max(1e-6 * std::max(std::abs(cf), scale), fd.error);
    EXPECT_LE(std::abs(cf - fd.value), tol) << cf << " vs " << fd.value;
  };
  for (const Point& p : sample_cloud(s, spec)) {
    const GaugeJets J(s, p);
    for (int a = 0; a < N; ++a) {
      check(J.grad[a], fd_oracle(s, rho, p, {a}), 1e-3);
      check(J.psi_grad[a], fd_oracle(s, psi, p, {a}), 1e-3 / J.rho);
      for (int b = 0; b < N; ++b) {
        check(J.hess(a, b), fd_oracle(s, rho, p, {a, b}), 1e-3 / J.rho);
        for (int c = 0; c < N; ++c)
          check(J.third(a, b, c), fd_oracle(s, rho, p, {a, b, c}), 1e-3 / (J.rho * J.rho));
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, Ladder,
                         ::testing::Combine(::testing::Values(0.5, 1.0, 2.0),
                                            ::testing::Values(std::pair{1, 1}, std::pair{2, 1},
                                                              std::pair{2, 3})));

class CalculusProperty : public ::testing::TestWithParam<std::tuple<double, int, int>> {};

// Smooth test field with analytic jets: sin(z_1) e^{t_1} + z_1² t_1.
Jet2 smooth_jet(const GrushinSpace& s, const Point& p) {
  const Jet2 z1 = coordinate_jet(s, p, 0);
  const Jet2 t1 = coordinate_jet(s, p, s.m());
  const Jet2 sz = compose(z1, std::sin(z1.value), std::cos(z1.value), -std::sin(z1.value));
  return sz * exp(t1) + z1 * z1 * t1;
}

TEST_P(CalculusProperty, Identities) {
  const auto [g, m, k] = GetParam();
  const GrushinSpace s(m, k, g);
  SampleSpec spec;
  spec.count = 100;
  spec.rho_min = 0.05;
  spec.rho_max = 3;
  spec.psi_min = 1e-2;
  spec.seed = 5;
  const ScalarField v = field_from_jets([s](const Point& p) { return smooth_jet(s, p); });
  const ScalarField v_plain([v](const Point& p) { return v(p); });
  for (const Point& p : sample_cloud(s, spec)) {
    const GaugeJets J(s, p);
    EXPECT_NEAR(J.grad.squaredNorm(), J.psi, 1e-12 * J.psi);
    for (int i = 0; i < m; ++i) EXPECT_LE(std::abs(J.grad[i]), std::pow(J.psi, 1 + 0.5 / g) * (1 + 1e-12));
    for (int j = 0; j < k; ++j) EXPECT_LE(std::abs(J.grad[m + j]), (g + 1) * std::sqrt(J.psi) * (1 + 1e-12));
    // <Xv, Xρ> = (ψ/ρ) Zv
    const Vec xv = v.x_gradient(p);
    const double lhs = xv.dot(J.grad), rhs = J.psi / J.rho * generator_apply(s, v, p);
    EXPECT_LE(std::abs(lhs - rhs), 1e-8 * (1 + xv.norm()));
    // [X_i, Z] v = X_i v
    const VectorField Z = generator_field(s);
    for (int i = 0; i < s.N(); ++i) {
      const VectorField Xi = x_field(s, i);
      const VectorField a[] = {Xi, Z}, b[] = {Z, Xi};
      const double c = fd_along(s, v_plain, p, a).value - fd_along(s, v_plain, p, b).value;
      EXPECT_NEAR(c, xv[i], 1e-6 * std::max(1.0, std::abs(xv[i])));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Spaces, CalculusProperty,
                         ::testing::Combine(::testing::Values(0.5, 1.0, 2.0), ::testing::Values(1, 2),
                                            ::testing::Values(1, 3)));

TEST(Jets, FieldFromJetsMatchesOracle) {
  const GrushinSpace s(2, 1, 1.5);
  const Point p = make_point({0.4, -0.3}, {0.2});
  const ScalarField v = field_from_jets([s](const Point& q) { return smooth_jet(s, q); });
  const ScalarField plain([v](const Point& q) { return v(q); });
  const Mat H = v.x_hessian(p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(H(i, j), fd_oracle(s, plain, p, {i, j}).value, 1e-6);
}

}  // namespace
}  // namespace grushin
