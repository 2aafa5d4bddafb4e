#include <gtest/gtest.h>

#include <cmath>

#include "grushin/operators.hpp"
#include "grushin/test_functions.hpp"

namespace grushin {
namespace {

ExampleParams varied() {
  ExampleParams p;
  p.f1 = 0.05;
  p.g1 = -0.03;
  p.h1 = 0.02;
  return p;
}

// (1 − |x|²)² (1 + z_1 + 2 t_1) built from coordinate jets.
JetFunction polynomial_bump(const GrushinSpace& s) {
  return [s](const Point& p) {
    const int N = s.N();
    Jet2 w = Jet2::constant(N, 1.0);
    for (int l = 0; l < N; ++l) {
      const Jet2 c = coordinate_jet(s, p, l);
      w = w - c * c;
    }
    return w * w * (1.0 + coordinate_jet(s, p, 0) + 2.0 * coordinate_jet(s, p, s.m()));
  };
}

// 25-digit values of Σ ∂_i(M_ij ∂_j u) with M = D A D, D = diag(1, |z|^γ), expanded symbolically.
TEST(ApplyL, ExampleFamilyMatchesEuclideanExpansion) {
  struct Case {
    int m, k;
    double g;
    Point p;
    double expect;
  } cases[] = {
      {1, 1, 1.0, make_point({0.4}, {-0.3}), -3.817051747622758562},
      {2, 1, 0.5, make_point({0.3, -0.5}, {0.2}), -9.459173470109911826},
      {1, 2, 2.0, make_point({0.6}, {0.1, -0.25}), -3.035770381959057573},
  };
  for (const auto& c : cases) {
    const GrushinSpace s(c.m, c.k, c.g);
    const ExampleCoefficients A(s, varied());
    const Jet2 u = polynomial_bump(s)(c.p);
    EXPECT_NEAR(apply_L(A, u, c.p), c.expect, 1e-12 * std::abs(c.expect)) << c.m << c.k << c.g;
  }
}

TEST(ApplyL, DifferenceJetsAgreeWithAnalyticJets) {
  const GrushinSpace s(2, 1, 0.5);
  const DegenerateOperator op(std::make_shared<ExampleCoefficients>(s, varied()));
  const ScalarField analytic = field_from_jets(polynomial_bump(s));
  const auto jf = polynomial_bump(s);
  const ScalarField plain([jf](const Point& p) { return jf(p).value; });
  const Point p = make_point({0.3, -0.5}, {0.2});
  EXPECT_NEAR(apply_L(op, plain, p), apply_L(op, analytic, p), 1e-5);
  EXPECT_THROW(apply_L(op, analytic, make_point({0, 0}, {0.2})), DomainError);
}

class Identities : public ::testing::TestWithParam<std::tuple<double, int, int>> {};

TEST_P(Identities, FundamentalSolutionAndRadialIdentity) {
  const auto [g, m, k] = GetParam();
  const GrushinSpace s(m, k, g);
  const IdentityCoefficients I(s);
  const double Q = s.Q();
  SampleSpec spec;
  spec.count = 100;
  spec.seed = 41;
  const BumpProfile bump{0.05, 0.9, 4};
  const RadialProfile profiles[] = {
      {[](double r) { return r * r; }, [](double r) { return 2 * r; }, [](double) { return 2.0; }},
      {[Q](double r) { return std::pow(r, 2 - Q); }, [Q](double r) { return (2 - Q) * std::pow(r, 1 - Q); },
       [Q](double r) { return (2 - Q) * (1 - Q) * std::pow(r, -Q); }},
      {[](double r) { return std::exp(-r * r); }, [](double r) { return -2 * r * std::exp(-r * r); },
       [](double r) { return (4 * r * r - 2) * std::exp(-r * r); }},
      {[bump](double r) { double f, d, dd; bump.eval(r, f, d, dd); return f; },
       [bump](double r) { double f, d, dd; bump.eval(r, f, d, dd); return d; },
       [bump](double r) { double f, d, dd; bump.eval(r, f, d, dd); return dd; }},
  };
  for (const Point& p : sample_cloud(s, spec)) {
    const GaugeJets gj(s, p);
    const Jet2 r = rho_jet(gj);
    const double rho = gj.rho, psi = gj.psi;
    EXPECT_NEAR(apply_L(I, pow(r, 2 - Q), p), 0.0, 1e-8 * std::pow(rho, -Q));
    const double r2 = apply_L(I, r * r, p);
    EXPECT_NEAR(r2, 2 * Q * psi, 1e-8 * 2 * Q * psi);
    EXPECT_NEAR(grushin_apply(r * r), r2, 1e-12 * std::abs(r2));
    for (const auto& f : profiles) EXPECT_NO_THROW(radial_apply(s, f, p, true));
    EXPECT_NEAR(radial_apply(s, profiles[1], p), 0.0, 1e-12 * std::pow(rho, -Q));
  }
}

INSTANTIATE_TEST_SUITE_P(Spaces, Identities,
                         ::testing::Combine(::testing::Values(0.5, 1.0, 2.0), ::testing::Values(1, 2),
                                            ::testing::Values(1, 3)));

TEST(Radial, LogarithmInThreeHomogeneousDimensions) {
  const GrushinSpace s(1, 1, 1.0);
  const RadialProfile lg{[](double r) { return std::log(r); }, [](double r) { return 1 / r; },
                         [](double r) { return -1 / (r * r); }};
  const Point p = make_point({0.5}, {0.2});
  const auto gv = gauge_and_angle(s, p);
  EXPECT_NEAR(radial_apply(s, lg, p, true), gv.psi / (gv.rho * gv.rho), 1e-14);
  EXPECT_THROW(radial_apply(s, lg, make_point({0}, {0})), DomainError);
}

TEST(Commutators, ContractionMatchesHessianAntisymmetry) {
  const GrushinSpace s(2, 3, 1.5);
  const auto tb = tensor_bump(s, 0.1, 0.9, -0.3, 0.3, 0.4, 4);
  const Point p = make_point({0.3, 0.35}, {0.05, -0.1, 0.2});
  const Jet2 u = tb.jet(p);
  Vec c(5);
  c << 0.3, -1.2, 0.7, 0.25, -0.5;
  const Vec got = commutator_contraction(s, p, c, u.grad);
  const Vec want = u.hess * c - u.hess.transpose() * c;
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12 * (1 + want.cwiseAbs().maxCoeff()));
}

TEST(Rellich, ZeroFunctionHasZeroResidual) {
  const GrushinSpace s(1, 1, 1.0);
  const DegenerateOperator op(std::make_shared<IdentityCoefficients>(s));
  QuadratureGrid g;
  g.n_z = 16;
  const auto r = rellich_residual(op, zero_function(s).field(), {2 - s.Q(), false}, {0.2, 0.9}, g);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.scale, 0.0);
}

TEST(Rellich, LeakingSupportIsRejected) {
  const GrushinSpace s(1, 1, 1.0);
  const DegenerateOperator op(std::make_shared<IdentityCoefficients>(s));
  EXPECT_THROW(rellich_residual(op, radial_bump(s, 0.3, 0.8, 4).field(), {2 - s.Q(), false}, {0.4, 1.0}, {}),
               DomainError);
}

double refinement_order(const std::vector<double>& n, const std::vector<double>& r) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) mx += std::log(n[i]), my += std::log(r[i]);
  mx /= n.size();
  my /= n.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxy += (std::log(n[i]) - mx) * (std::log(r[i]) - my);
    sxx += (std::log(n[i]) - mx) * (std::log(n[i]) - mx);
  }
  return -sxy / sxx;
}

// The residual is pure quadrature error, so it must fall at the midpoint rule's second order.
TEST(Rellich, ResidualConvergesUnderRefinement) {
  const GrushinSpace s(1, 1, 1.0);
  const CoefficientPtr As[] = {std::make_shared<IdentityCoefficients>(s),
                               std::make_shared<ExampleCoefficients>(s, varied())};
  const TestFunction us[] = {radial_bump(s, 0.3, 0.8, 4), angular_bump(s, 0.3, 0.8, 4, 0.6),
                             tensor_bump(s, 0.2, 0.6, -0.1, 0.15, 0.1, 4)};
  const std::vector<double> ns{32, 64, 128, 256};
  for (const auto& A : As)
    for (const auto& u : us)
      for (bool lg : {false, true}) {
        const DegenerateOperator op(A);
        std::vector<double> res;
        RellichResult last;
        for (double n : ns) {
          QuadratureGrid g;
          g.n_z = int(n);
          last = rellich_residual(op, u.field(), {2 - s.Q(), lg}, {0.1, 0.9}, g);
          res.push_back(last.residual);
        }
        const std::string tag = A->name() + " " + u.name + (lg ? " log" : "");
        EXPECT_GE(refinement_order(ns, res), 2.0) << tag;
        EXPECT_LE(last.residual, 1e-3) << tag;
        EXPECT_LE(last.residual, last.residual_error) << tag;
        EXPECT_GT(last.scale, 1.0) << tag;
      }
}

}  // namespace
}  // namespace grushin
