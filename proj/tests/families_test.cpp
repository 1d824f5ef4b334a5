#include "lsf/probes.hpp"
#include "lsf/suites.hpp"

#include <gtest/gtest.h>

using namespace lsf;

TEST(ThreeBranch, ZeroParameterDuplicatesTheFirstMap)
{
  auto const F = make_three_branch(0.0);
  ASSERT_EQ(F.size(), 3u);
  EXPECT_EQ(F[0].matrix(), F[1].matrix());
  EXPECT_EQ(F[0].translation(), F[1].translation());
}

TEST(ThreeBranch, HalfParameterAttractorIsAnInterval)
{
  auto const F = make_three_branch(0.5);
  GridSet const shape(1, 12, {});
  auto const att = attractor(F, 2.0 * shape.diagonal(), 12);
  auto const fr = unit_frame();
  double lo = 1.0, hi = -1.0;
  for (auto c : att.grid.cells())
  {
    lo = std::min(lo, att.grid.center(c)(0));
    hi = std::max(hi, att.grid.center(c)(0));
  }
  EXPECT_NEAR(fr.to_natural(lo), 0.0, 1e-3);
  EXPECT_NEAR(fr.to_natural(hi), 0.5, 1e-3);
}

TEST(ThreeBranch, DomainIsChecked)
{
  EXPECT_THROW(make_three_branch(-0.1), domain_error);
  EXPECT_THROW(make_three_branch(1.5), domain_error);
  EXPECT_NO_THROW(make_three_branch(1.0));
}

TEST(ThreeBranch, NaturalMapsRoundTrip)
{
  double const t = 0.37;
  auto const F = make_three_branch(t);
  auto const fr = unit_frame();
  std::array<double, 3> const shifts{0.0, t, 1.0};
  for (double x : {0.0, 0.2, 0.5, 1.0})
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(fr.to_natural(F[j].eval(make_vec({fr.to_normalized(x)}))(0)),
                  (x + shifts[j]) / 3.0, 1e-14);
}

TEST(Rational, Classification)
{
  auto const half = classify_rational(1, 2);
  EXPECT_EQ(half.label, RationalCase::full_measure);
  EXPECT_DOUBLE_EQ(half.measure, 0.5);
  EXPECT_EQ(half.name(), "FULL_MEASURE(1/2)");

  auto const quarter = classify_rational(1, 4);
  EXPECT_EQ(quarter.label, RationalCase::dimension_deficit);
  EXPECT_EQ(quarter.measure, 0.0);
  EXPECT_EQ(quarter.name(), "DIMENSION_DEFICIT");

  auto const reduced = classify_rational(2, 4);
  EXPECT_EQ(reduced.p, 1);
  EXPECT_EQ(reduced.q, 2);
  EXPECT_EQ(reduced.label, RationalCase::full_measure);

  // 1 * 3 = 3 == 0 mod 3.
  EXPECT_EQ(classify_rational(1, 3).label, RationalCase::dimension_deficit);
  // 1 * 5 = 5 == 2 mod 3.
  EXPECT_EQ(classify_rational(1, 5).label, RationalCase::full_measure);
  EXPECT_EQ(classify_rational(0, 1).label, RationalCase::dimension_deficit);
}

TEST(Rational, BadInputs)
{
  EXPECT_THROW(classify_rational(1, 0), domain_error);
  EXPECT_THROW(classify_rational(2, 3), domain_error);
  EXPECT_THROW(classify_rational(-1, 3), domain_error);
}

TEST(Rational, FullMeasureCaseAgreesWithTheGrid)
{
  auto const c = classify_rational(1, 5);
  auto const F = make_three_branch(0.2);
  GridSet const shape(1, 12, {});
  auto const att = attractor(F, 2.0 * shape.diagonal(), 12);
  auto const mb = measure_bracket(att.grid, F);
  auto const fr = unit_frame();
  EXPECT_LE(fr.measure_to_natural(mb.inner), c.measure + 1e-12);
  EXPECT_GE(fr.measure_to_natural(mb.outer), c.measure - 1e-12);
}

TEST(GLambda, DomainIsChecked)
{
  EXPECT_THROW(make_g_lambda(0.3), domain_error);
  EXPECT_THROW(make_g_lambda(0.0), domain_error);
  EXPECT_NO_THROW(make_g_lambda(0.25));
}

TEST(GLambda, QuarterTouchesOnlyInClosure)
{
  auto const r = check_osc(make_g_lambda(0.25), Box{make_vec({-1.0}), make_vec({1.0})});
  EXPECT_TRUE(r.certified);
  EXPECT_FALSE(r.closure_disjoint);
}

TEST(GLambda, MoranValue)
{
  auto const F = make_g_lambda(0.1);
  std::vector<double> ratios;
  for (auto const &f : F.maps())
    ratios.push_back(f.lipschitz());
  EXPECT_NEAR(moran_dimension(ratios), std::log(3.0) / std::log(10.0), 1e-12);
  EXPECT_TRUE(check_osc(F, Box{make_vec({-1.0}), make_vec({1.0})}).closure_disjoint);
}

TEST(FamilySpec, Behaviour)
{
  auto const fam = three_branch_family(0.3);
  EXPECT_EQ(fam.parameter(), "t");
  EXPECT_DOUBLE_EQ(fam.value(), 0.3);
  EXPECT_DOUBLE_EQ(fam.at(0.1).value(), 0.1);
  EXPECT_TRUE(fam.in_domain(1.0));
  EXPECT_FALSE(fam.in_domain(1.01));
  EXPECT_EQ(fam.system().size(), 3u);

  auto const g = g_lambda_family(0.2);
  EXPECT_EQ(g.parameter(), "lambda");
  EXPECT_FALSE(g.in_domain(0.26));

  auto const c = cantor_family();
  EXPECT_TRUE(c.parameter().empty());
  EXPECT_EQ(c.at(0.7).system().size(), 2u);

  FamilySpec const missing{"three_branch", {}, {}}, unknown{"nope", {}, {}},
      bare{"custom", {}, {}};
  EXPECT_THROW(missing.value(), domain_error);
  EXPECT_THROW(unknown.system(), domain_error);
  EXPECT_THROW(bare.system(), domain_error);
  EXPECT_EQ(custom_family(make_cantor()).system().size(), 2u);
  EXPECT_TRUE(custom_family(make_cantor()).frame().is_identity());
}

TEST(Frame, RoundTrips)
{
  auto const fr = unit_frame();
  for (double x : {0.0, 0.125, 0.5, 1.0})
    EXPECT_DOUBLE_EQ(fr.to_natural(fr.to_normalized(x)), x);
  EXPECT_DOUBLE_EQ(fr.to_normalized(0.0), -1.0);
  EXPECT_DOUBLE_EQ(fr.to_normalized(1.0), 1.0);
  EXPECT_DOUBLE_EQ(fr.length_to_natural(2.0), 1.0);
  EXPECT_DOUBLE_EQ(fr.measure_to_natural(1.0), 0.5);
}

TEST(DimensionProbe, AtZeroSkipsNegativeParameters)
{
  auto const pr = dimension_semicontinuity_probe(three_branch_family(0.0), 0.0, 0.05, 11, 7, 10,
                                                 0.05, 1.0);
  EXPECT_TRUE(pr.pass);
  EXPECT_NEAR(pr.lower_star, std::log(2.0) / std::log(3.0), 1e-12);
  EXPECT_EQ(pr.skipped.size(), 5u);
  EXPECT_EQ(pr.rows.size(), 6u);
}

TEST(DimensionProbe, ConstantFamilyPasses)
{
  auto const pr = dimension_semicontinuity_probe(cantor_family(), 0.0, 0.1, 3, 5, 10);
  EXPECT_TRUE(pr.pass);
  EXPECT_EQ(pr.min_lower, pr.lower_star);
}

TEST(Suites, FamiliesSuitePasses)
{
  auto const r = suite_families(1);
  EXPECT_TRUE(r.pass()) << to_json(r).dump();
}
