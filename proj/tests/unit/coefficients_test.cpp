#include <gtest/gtest.h>

#include <cmath>

#include "grushin/bounds.hpp"
#include "grushin/coefficients.hpp"

namespace grushin {
namespace {

TEST(Derived, IdentityAtDiagonalPoint) {
  const GrushinSpace s(1, 1, 1.0);
  const IdentityCoefficients A(s);
  const auto d = derived_at(A, s, make_point({1}, {1}));
  EXPECT_NEAR(d.mu, 0.44721359549995793, 1e-15);
  EXPECT_EQ(d.sigma, 0.0);
}

// Frozen from a 30-digit evaluation of the same contraction.
TEST(Derived, ExampleFamilyAtDiagonalPoint) {
  const GrushinSpace s(1, 1, 1.0);
  const ExampleCoefficients A(s, {});
  const auto d = derived_at(A, s, make_point({1}, {1}));
  EXPECT_NEAR(d.mu, 0.532142576879479650, 1e-14);
  EXPECT_NEAR(d.sigma, 0.0849289813795217108, 1e-14);
  EXPECT_NEAR(d.F_coeffs[0], 1.13415158139898299, 1e-13);
  EXPECT_NEAR(d.F_coeffs[1], 1.93292420930050850, 1e-13);
}

TEST(Derived, DegenerateAndNonElliptic) {
  const GrushinSpace s(1, 1, 1.0);
  const IdentityCoefficients I(s);
  EXPECT_THROW(derived_at(I, s, make_point({0}, {1})), DomainError);
  const FunctionCoefficients bad(s, [](const Point&) { Mat a = Mat::Identity(2, 2); a(0, 0) = 5; return a; },
                                 "bad", 0.5);
  EXPECT_THROW(derived_at(bad, s, make_point({1}, {1})), DomainError);
}

class FProperty : public ::testing::TestWithParam<std::tuple<double, int, int>> {};

TEST_P(FProperty, FOnGaugeAndConstantCollapse) {
  const auto [g, m, k] = GetParam();
  const GrushinSpace s(m, k, g);
  const IdentityCoefficients I(s);
  ExampleParams prm;
  prm.f1 = 0.05;
  prm.g1 = -0.03;
  prm.h1 = 0.02;
  const ExampleCoefficients E(s, prm);
  SampleSpec spec;
  spec.count = 150;
  spec.seed = 23;
  const ScalarField rho = rho_field(s);
  const ScalarField v([](const Point& p) { return std::sin(p.z[0]) * std::exp(p.t.size() ? p.t[0] : 0.0); });
  for (const Point& p : sample_cloud(s, spec)) {
    const double r = gauge_and_angle(s, p).rho;
    EXPECT_NEAR(F_apply(E, s, rho, p), r, 1e-10 * r);
    EXPECT_NEAR(F_apply(I, s, rho, p), r, 1e-10 * r);
    EXPECT_EQ(F_apply(E, s, ScalarField::constant(2.0), p), 0.0);
    if (p.z.norm() > 1e-2) {
      const double zv = generator_apply(s, v, p);
      EXPECT_NEAR(F_apply(I, s, v, p), zv, 1e-7 * (1 + std::abs(zv)));
    }
    const auto d = derived_at(E, s, p);
    const double psi = gauge_and_angle(s, p).psi;
    EXPECT_GE(d.mu, E.lambda() * psi);
    EXPECT_LE(d.mu, psi / E.lambda());
    const auto di = derived_at(I, s, p);
    EXPECT_NEAR(di.mu, psi, 1e-15 * (1 + psi) + 1e-12 * psi);
    EXPECT_NEAR(di.sigma, 0.0, 1e-15);
  }
}

TEST_P(FProperty, AnalyticCoefficientDerivativesMatchDifferences) {
  const auto [g, m, k] = GetParam();
  const GrushinSpace s(m, k, g);
  ExampleParams prm;
  prm.f1 = 0.05;
  prm.g1 = -0.03;
  prm.h1 = 0.02;
  const ExampleCoefficients E(s, prm);
  const ViolatingCoefficients V(s, 0.3);
  const FunctionCoefficients Ef(s, [&E](const Point& p) { return E.a(p); }, "copy");
  const FunctionCoefficients Vf(s, [&V](const Point& p) { return V.a(p); }, "copy");
  SampleSpec spec;
  spec.count = 40;
  spec.psi_min = 1e-2;
  spec.seed = 29;
  for (const Point& p : sample_cloud(s, spec))
    for (int l = 0; l < s.N(); ++l) {
      EXPECT_LE((E.x_derivative(l, p) - Ef.x_derivative(l, p)).cwiseAbs().maxCoeff(), 1e-7);
      EXPECT_LE((V.x_derivative(l, p) - Vf.x_derivative(l, p)).cwiseAbs().maxCoeff(), 1e-6);
    }
}

INSTANTIATE_TEST_SUITE_P(Spaces, FProperty,
                         ::testing::Combine(::testing::Values(0.5, 1.0, 2.0), ::testing::Values(1, 2),
                                            ::testing::Values(1, 3)));

TEST(Coefficients, IdentityAtOrigin) {
  const GrushinSpace s(2, 1, 1.0);
  const ExampleCoefficients E(s, {});
  EXPECT_EQ(E.a(make_point({0, 0}, {0})), Mat(Mat::Identity(3, 3)));
}

TEST(Hypothesis, IdentityHasZeroLambda) {
  const GrushinSpace s(1, 1, 1.0);
  const auto rep = hypothesis_check(IdentityCoefficients(s), s, {});
  EXPECT_EQ(rep.find("hypothesis.minimal_Lambda")->values["minimal_Lambda"], 0.0);
  EXPECT_TRUE(rep.passed());
}

TEST(Hypothesis, ExampleUpperLeftRatioIsC) {
  const GrushinSpace s(1, 1, 1.0);
  ExampleParams prm;
  prm.f0 = prm.g0 = prm.h0 = 0.1;
  const auto rep = hypothesis_check(ExampleCoefficients(s, prm), s, {});
  EXPECT_NEAR(rep.find("hypothesis.b_upper_left")->values["worst_ratio"].get<double>(), 0.1, 1e-12);
  EXPECT_TRUE(rep.passed());
}

TEST(Hypothesis, ViolatingFamilyFails) {
  const GrushinSpace s(1, 1, 1.0);
  SampleSpec spec;
  spec.rho_min = 1e-4;
  const auto rep = hypothesis_check(ViolatingCoefficients(s, 1.0), s, spec);
  const auto* r = rep.find("hypothesis.b_upper_left");
  const double worst = r->values["worst_ratio"];
  const double at = r->values["rho_at_worst"];
  EXPECT_NEAR(worst, 1 / std::sqrt(at), 1e-9 * worst);
  EXPECT_GT(worst, 50.0);
  EXPECT_FALSE(rep.passed());
}

TEST(BoundSuite, IdentityItemsVanish) {
  const GrushinSpace s(2, 1, 1.0);
  BoundSuiteOptions opt;
  opt.samples.count = 400;
  const auto rep = structural_bound_suite(IdentityCoefficients(s), opt);
  for (const char* n : {"bounds.div_F", "bounds.F_of_b_hess_rho", "bounds.sigma", "bounds.F_minus_Z"})
    EXPECT_LE(rep.find(n)->values["sup_ratio_full"].get<double>(), 1e-9) << n;
  EXPECT_TRUE(rep.passed());
}

TEST(BoundSuite, ExampleFamilyStable) {
  const GrushinSpace s(1, 1, 1.0);
  BoundSuiteOptions opt;
  opt.samples.count = 20000;
  const auto rep = structural_bound_suite(ExampleCoefficients(s, {}), opt);
  for (const auto& r : rep.records) EXPECT_NE(r.verdict, Verdict::fail) << r.name << " " << r.values.dump();
  for (const auto& r : rep.records) EXPECT_TRUE(anchor_registered(r.anchor)) << r.anchor;
}

}  // namespace
}  // namespace grushin
