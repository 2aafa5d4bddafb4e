#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "grushin/operators.hpp"
#include "grushin/potentials.hpp"
#include "grushin/sampling.hpp"
#include "grushin/test_functions.hpp"

using namespace grushin;

namespace {

using SpaceParam = std::tuple<double, int, int>;

GrushinSpace space_of(const SpaceParam& p) { return GrushinSpace(std::get<1>(p), std::get<2>(p), std::get<0>(p)); }

bool jet_is_zero(const Jet2& j) { return j.value == 0 && j.grad.isZero(0) && j.hess.isZero(0); }

}  // namespace

class Families : public ::testing::TestWithParam<SpaceParam> {};

TEST_P(Families, VanishOutsideTheirSupport) {
  const GrushinSpace s = space_of(GetParam());
  SampleSpec spec;
  spec.count = 3000;
  spec.rho_min = 0.01;
  spec.rho_max = 0.6;
  const auto cloud = sample_cloud(s, spec);
  for (const auto& u : standard_suite(s, 0.5)) {
    std::size_t inside = 0;
    for (const Point& p : cloud) {
      const double rho = gauge_and_angle(s, p).rho;
      const Jet2 j = u.jet(p);
      if (rho < u.support.r_in || rho > u.support.r_out) {
        ASSERT_TRUE(jet_is_zero(j)) << u.name << " at ρ = " << rho;
      } else if (!jet_is_zero(j)) {
        ++inside;
      }
    }
    EXPECT_GT(inside, 0u) << u.name;
  }
}

TEST_P(Families, JetsMatchDifferences) {
  const GrushinSpace s = space_of(GetParam());
  SampleSpec spec;
  spec.count = 400;
  spec.rho_min = 0.05;
  spec.rho_max = 0.5;
  spec.min_znorm = 0.05;
  const auto cloud = sample_cloud(s, spec);
  for (const auto& u : standard_suite(s, 0.5)) {
    const auto jf = u.jet;
    const ScalarField plain([jf](const Point& p) { return jf(p).value; });
    int checked = 0;
    for (const Point& p : cloud) {
      const Jet2 a = u.jet(p);
      if (std::abs(a.value) < 1e-3) continue;
      const Jet2 fd = jet_at(s, plain, p);
      const double scale = std::max(1.0, a.hess.cwiseAbs().maxCoeff());
      EXPECT_NEAR((a.grad - fd.grad).cwiseAbs().maxCoeff() / scale, 0, 1e-6) << u.name;
      EXPECT_NEAR((a.hess - fd.hess).cwiseAbs().maxCoeff() / scale, 0, 1e-4) << u.name;
      if (++checked == 5) break;
    }
  }
}

TEST_P(Families, StandardSuiteComposition) {
  const GrushinSpace s = space_of(GetParam());
  const auto suite = standard_suite(s, 0.5);
  ASSERT_EQ(suite.size(), 20u);
  std::set<std::string> names;
  int radial = 0, angular = 0, tensor = 0;
  for (const auto& u : suite) {
    names.insert(u.name);
    radial += u.kind == "radial";
    angular += u.kind == "angular";
    tensor += u.kind == "tensor";
    EXPECT_GE(u.support.r_in, 0.05);
    EXPECT_LE(u.support.r_out, 0.5);
    EXPECT_GE(u.order, 6);
    EXPECT_EQ(u.box.has_value(), u.kind == "tensor");
  }
  EXPECT_EQ(names.size(), 20u);
  EXPECT_EQ(radial, 10);
  EXPECT_EQ(angular, 5);
  EXPECT_EQ(tensor, 5);
}

TEST_P(Families, BoxRuleIntegratesVolume) {
  const GrushinSpace s = space_of(GetParam());
  const int m = s.m(), k = s.k();
  const TensorBox b{0.1, 0.3, -0.02, 0.05, 0.03};
  PolarGrid g;
  g.grading_slope = k == 1 ? 50 : 1;
  g.radial_panels = 4;
  g.sphere_points = 8;
  long double v = 0;
  for_each_box_node(s, b, g, [&v](const PolarNode& nd) { v += nd.weight; });
  const double zvol = m == 1 ? 2 * (b.z_hi - b.z_lo) : std::numbers::pi * (b.z_hi * b.z_hi - b.z_lo * b.z_lo);
  const double exact = zvol * (b.t_hi - b.t_lo) * std::pow(2 * b.t_w, k - 1);
  EXPECT_NEAR(double(v), exact, 1e-12 * exact);
}

INSTANTIATE_TEST_SUITE_P(Spaces, Families,
                         ::testing::Values(SpaceParam{1.0, 1, 1}, SpaceParam{0.5, 2, 1}, SpaceParam{2.0, 1, 2}));

TEST(TestFunctions, TensorSupportBoundIsTight) {
  const GrushinSpace s(1, 1, 1.0);
  const auto u = tensor_bump(s, 0.1, 0.3, -0.05, -0.01, 0.02, 6);
  double lo = 1e300;
  PolarGrid g;
  g.grading_slope = 1e4;
  for_each_box_node(s, *u.box, g, [&](const PolarNode& nd) { lo = std::min(lo, nd.rho); });
  EXPECT_GE(lo, u.support.r_in);
  EXPECT_LT(lo - u.support.r_in, 1e-3 * u.support.r_in);
}

TEST(TestFunctions, Rejections) {
  const GrushinSpace s(1, 1, 1.0);
  EXPECT_THROW(radial_bump(s, 0.0, 0.4, 6), DomainError);
  EXPECT_THROW(radial_bump(s, 0.4, 0.3, 6), DomainError);
  EXPECT_THROW(tensor_bump(s, 0.3, 0.2, 0, 1, 1, 6), DomainError);
}

TEST(Potentials, DeclaredBoundsHold) {
  const GrushinSpace s(1, 1, 1.0);
  SampleSpec spec;
  spec.count = 2000;
  spec.rho_max = 0.5;
  for (auto A : {CoefficientPtr(std::make_shared<IdentityCoefficients>(s)),
                 CoefficientPtr(std::make_shared<ExampleCoefficients>(s, ExampleParams{}))}) {
    for (auto kind : {PotentialSpec::Kind::bounded, PotentialSpec::Kind::hardy}) {
      const auto rep = potential_check(PotentialSpec::modulated(kind, 10), *A, spec);
      EXPECT_TRUE(rep.passed()) << A->name() << " " << PotentialSpec::modulated(kind, 10).name();
    }
    PotentialSpec c1 = PotentialSpec::modulated(PotentialSpec::Kind::c1, 10);
    const auto rep = potential_check(c1, *A, spec);
    EXPECT_TRUE(rep.passed()) << rep.records.front().values.dump();
  }
}

TEST(Potentials, ViolatedBoundIsReported) {
  const GrushinSpace s(1, 1, 1.0);
  IdentityCoefficients A(s);
  PotentialSpec v = PotentialSpec::modulated(PotentialSpec::Kind::bounded, 10);
  v.modulation = 3.0;  // |V| reaches 2Kψ
  const auto rep = potential_check(v, A, {});
  EXPECT_FALSE(rep.passed());
}

TEST(Potentials, VJetsMatchDifferences) {
  const GrushinSpace s(2, 1, 0.5);
  const PotentialSpec v = PotentialSpec::modulated(PotentialSpec::Kind::hardy, 4);
  const ScalarField plain([&](const Point& p) { return v.V(s, p).value; });
  Point p;
  p.z = Vec(2);
  p.z << 0.3, -0.2;
  p.t = Vec(1);
  p.t << 0.15;
  const Jet2 a = v.V(s, p);
  const Jet2 fd = jet_at(s, plain, p);
  EXPECT_LT((a.grad - fd.grad).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, a.grad.norm()));
  EXPECT_LT((a.hess - fd.hess).cwiseAbs().maxCoeff(), 1e-4 * std::max(1.0, a.hess.norm()));
}

TEST(Potentials, SublinearityAssumptions) {
  const GrushinSpace s(1, 1, 1.0);
  IdentityCoefficients A(s);
  const PotentialSpec f = PotentialSpec::sublinear(1.5, 0.5);
  EXPECT_EQ(f.f(0.0), 0.0);
  EXPECT_DOUBLE_EQ(f.f(0.25), 0.5 * 0.5);
  EXPECT_DOUBLE_EQ(f.f(-0.25), -0.5 * 0.5);
  EXPECT_DOUBLE_EQ(f.G(0.25), 0.5 * 0.125 / 1.5);
  const auto rep = potential_check(f, A, {});
  ASSERT_EQ(rep.records.size(), 1u);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.records.front().values["max_sf_over_qG"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(PotentialSpec{}.f(0.3), 0.0);
}
