#include <gtest/gtest.h>

#include "grushin/suites.hpp"

using namespace grushin;

TEST(Suites, LadderPassesOnAMixedSpace) {
  LadderOptions opt;
  opt.points = 20;
  const auto rep = derivative_ladder(GrushinSpace(2, 3, 0.5), opt);
  ASSERT_EQ(rep.records.size(), 4u);
  for (const auto& r : rep.records) {
    EXPECT_EQ(r.verdict, Verdict::pass) << r.name << " " << r.values.dump();
    EXPECT_TRUE(anchor_registered(r.anchor));
  }
  // 5³ third-derivative comparisons per point.
  EXPECT_EQ(rep.find("ladder.third.gamma0.5_m2_k3")->values["comparisons"], 20 * 125);
}

TEST(Suites, LadderIsThreadIndependent) {
  LadderOptions opt;
  opt.points = 12;
  const GrushinSpace s(1, 1, 2.0);
  const auto a = derivative_ladder(s, opt);
  opt.threads = 3;
  EXPECT_EQ(a.records_json(), derivative_ladder(s, opt).records_json());
}

TEST(Suites, IdentitiesHoldForBothFamilies) {
  const GrushinSpace s(2, 1, 1.0);
  IdentityOptions opt;
  opt.points = 30;
  for (const CoefficientPtr& A : {CoefficientPtr(std::make_shared<IdentityCoefficients>(s)),
                                  CoefficientPtr(std::make_shared<ExampleCoefficients>(s, ExampleParams{}))}) {
    const auto rep = exact_identities(*A, opt);
    EXPECT_GE(rep.records.size(), 6u);
    for (const auto& r : rep.records) EXPECT_NE(r.verdict, Verdict::fail) << r.name << " " << r.values.dump();
  }
}

TEST(Suites, RellichResidualFallsUnderRefinement) {
  const GrushinSpace s(1, 1, 1.0);
  RellichOptions opt;
  opt.grids = {32, 64, 128};
  const auto rep = rellich_suite({std::make_shared<IdentityCoefficients>(s)}, opt);
  EXPECT_EQ(rep.records.size(), 6u);
  for (const auto& r : rep.records) EXPECT_EQ(r.verdict, Verdict::pass) << r.name << " " << r.values.dump();
  EXPECT_EQ(rep.tables.at("rellich").rows.size(), 18u);
}

TEST(Suites, PsiMassScalesWithTheHomogeneousDimension) {
  const auto rep = psi_mass_scaling(GrushinSpace(1, 1, 1.0));
  const auto* r = rep.find("scaling.psi_mass.gamma1_m1_k1");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_EQ(rep.regression.size(), 1u);
  // Q = m + (γ+1)k
  const auto rep2 = psi_mass_scaling(GrushinSpace(2, 1, 0.5));
  EXPECT_EQ(rep2.records.front().verdict, Verdict::pass) << rep2.records.front().values.dump();
}
